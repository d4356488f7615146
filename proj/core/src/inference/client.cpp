#include "psc/inference/client.hpp"

#include <httplib.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <random>
#include <thread>

#include <json.hpp>

#include "psc/core/validate.hpp"
#include "psc/errors.hpp"
#include "psc/util/csv.hpp"
#include "psc/util/io.hpp"
#include "psc/util/random.hpp"
#include "psc/util/url.hpp"

namespace psc::inference {

using nlohmann::json;

std::size_t prefix_token_count(std::size_t n_tokens, double cut_fraction) {
    if (!(cut_fraction > 0 && cut_fraction < 1)) throw PreconditionError("cut fraction must be in (0, 1)");
    auto k = static_cast<std::size_t>(std::floor(cut_fraction * static_cast<double>(n_tokens)));
    return std::max<std::size_t>(1, k);
}

CompletionClient::CompletionClient(EndpointConfig endpoint)
    : endpoint_(std::move(endpoint)), requests_(std::make_shared<std::atomic<std::size_t>>(0)) {
    endpoint_.validate();
    if (!endpoint_.api_key) {
        if (const char* env = std::getenv("PSC_API_KEY"); env && *env) endpoint_.api_key = env;
    }
}

std::string CompletionClient::post(const std::string& body) const {
    auto url = util::split_url(endpoint_.base_url);
    httplib::Client cli(url.origin);
    auto secs = static_cast<time_t>(endpoint_.request_timeout_seconds);
    auto usecs = static_cast<time_t>((endpoint_.request_timeout_seconds - static_cast<double>(secs)) * 1e6);
    cli.set_connection_timeout(secs, usecs);
    cli.set_read_timeout(secs, usecs);
    cli.set_write_timeout(secs, usecs);
    httplib::Headers headers;
    if (endpoint_.api_key) headers.emplace("Authorization", "Bearer " + *endpoint_.api_key);
    std::mt19937_64 jitter(util::fnv1a(body));
    std::string last_error;
    for (int attempt = 0; attempt <= endpoint_.retries; ++attempt) {
        if (attempt > 0) {
            double wait = endpoint_.backoff_seconds * std::pow(2.0, attempt - 1) * (0.5 + util::uniform01(jitter));
            std::this_thread::sleep_for(std::chrono::duration<double>(wait));
        }
        ++*requests_;
        auto res = cli.Post(url.prefix + "/v1/completions", headers, body, "application/json");
        if (!res) {
            last_error = "transport error: " + httplib::to_string(res.error());
            continue;
        }
        if (res->status == 200) return res->body;
        last_error = "HTTP " + std::to_string(res->status) + ": " + res->body.substr(0, 500);
        if (res->status == 429 || res->status >= 500) continue;
        std::string lower = res->body;
        for (auto& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        if (lower.find("unsupported") != std::string::npos || lower.find("not supported") != std::string::npos) {
            throw UnsupportedError(last_error);
        }
        throw EndpointError(last_error);
    }
    throw EndpointError(last_error);
}

namespace {

struct Choice {
    std::string text;
    std::vector<TokenRecord> tokens;  // offsets relative to the prompt start
};

Choice parse_choice(const std::string& body) {
    Choice c;
    try {
        auto j = json::parse(body);
        const auto& choice = j.at("choices").at(0);
        c.text = choice.at("text").get<std::string>();
        auto lp = choice.find("logprobs");
        if (lp == choice.end() || lp->is_null()) throw UnsupportedError("endpoint returned no logprobs");
        const auto& toks = lp->at("tokens");
        const auto& probs = lp->at("token_logprobs");
        const auto& offs = lp->at("text_offset");
        if (toks.size() != probs.size() || toks.size() != offs.size()) {
            throw SchemaError("logprobs arrays differ in length");
        }
        for (std::size_t i = 0; i < toks.size(); ++i) {
            TokenRecord r;
            r.text = toks[i].get<std::string>();
            r.byte_start = offs[i].get<std::size_t>();
            r.byte_end = r.byte_start + r.text.size();
            // The first echoed token has no conditional probability.
            if (probs[i].is_null()) {
                if (i != 0) throw UnsupportedError("endpoint omitted a logprob after the first token");
                r.logprob = 0.0;
            } else {
                r.logprob = probs[i].get<double>();
            }
            c.tokens.push_back(std::move(r));
        }
    } catch (const json::exception& e) {
        throw SchemaError(std::string("unexpected completion response: ") + e.what());
    }
    return c;
}

void add_decoding_fields(json& body, const DecodingConfig& c) {
    switch (c.strategy) {
        case Strategy::greedy:
            body["temperature"] = 0;
            break;
        case Strategy::beam:
            body["temperature"] = 0;
            body["num_beams"] = *c.num_beams;
            body["early_stopping"] = *c.early_stopping;
            break;
        case Strategy::contrastive:
            body["penalty_alpha"] = *c.penalty_alpha;
            body["top_k"] = *c.top_k;
            break;
        case Strategy::sampling:
            body["temperature"] = c.temperature;
            break;
        case Strategy::top_k:
            body["temperature"] = c.temperature;
            body["top_k"] = *c.top_k;
            break;
        case Strategy::top_p:
            body["temperature"] = c.temperature;
            body["top_p"] = *c.top_p;
            break;
    }
    if (c.seed) body["seed"] = *c.seed;
}

}  // namespace

TokenTrace CompletionClient::score_fixed(const std::string& snippet, const std::string& sample_id) const {
    if (snippet.empty()) throw PreconditionError("cannot score an empty snippet");
    json body = {{"model", endpoint_.model}, {"prompt", snippet}, {"max_tokens", 0},
                 {"echo", true},             {"logprobs", 0},      {"temperature", 0}};
    Choice c = parse_choice(post(body.dump()));
    if (c.tokens.empty()) throw UnsupportedError("endpoint cannot return prompt logprobs");
    TokenTrace t;
    t.sample_id = sample_id;
    t.source = snippet;
    t.tokens = std::move(c.tokens);
    t.meta["model"] = endpoint_.model;
    t.meta["mode"] = "score_fixed";
    return validate_trace(std::move(t));
}

TokenTrace CompletionClient::complete_prefix(const std::string& snippet, double cut_fraction,
                                             const DecodingConfig& config, const std::string& sample_id,
                                             const std::string& prompt_header) const {
    config.validate();
    TokenTrace full = score_fixed(snippet, sample_id);
    std::vector<std::size_t> ends;
    for (const auto& tok : full.tokens) {
        if (!tok.zero_width()) ends.push_back(tok.byte_end);
    }
    if (ends.size() < 2) throw PreconditionError("snippet must tokenize to at least two tokens");
    std::size_t k = prefix_token_count(ends.size(), cut_fraction);
    std::string prefix = snippet.substr(0, ends[k - 1]);

    bool echo = prompt_header.empty();
    json body = {{"model", endpoint_.model},
                 {"prompt", prompt_header + prefix},
                 {"max_tokens", config.max_new_tokens},
                 {"echo", echo},
                 {"logprobs", 0}};
    add_decoding_fields(body, config);
    Choice c = parse_choice(post(body.dump()));

    TokenTrace t;
    t.sample_id = sample_id;
    std::string completion;
    if (echo) {
        if (c.text.compare(0, prefix.size(), prefix) != 0) throw SchemaError("echoed text does not start with the prompt");
        completion = c.text.substr(prefix.size());
        t.tokens = std::move(c.tokens);
    } else {
        completion = c.text;
        for (auto& tok : c.tokens) {
            if (tok.byte_start < prompt_header.size()) throw SchemaError("completion token offset inside the prompt");
            tok.byte_start -= prompt_header.size();
            tok.byte_end -= prompt_header.size();
            t.tokens.push_back(std::move(tok));
        }
    }
    t.source = prefix + completion;
    t.generated_from = prefix.size();
    bool generated = std::any_of(t.tokens.begin(), t.tokens.end(), [&](const TokenRecord& r) {
        return !r.zero_width() && r.byte_start >= prefix.size();
    });
    if (completion.empty() || !generated) throw EmptyCompletionError("endpoint returned no completion tokens");
    t.meta["model"] = endpoint_.model;
    t.meta["mode"] = "complete_prefix";
    t.meta["decoding"] = config.id();
    t.meta["cut_fraction"] = util::format_double(cut_fraction);
    t.meta["prefix_tokens"] = std::to_string(k);
    t.meta["logprobs"] = "as emitted by the endpoint";
    return validate_trace(std::move(t));
}

TokenTrace score_fixed(const std::string& snippet, const EndpointConfig& endpoint) {
    return CompletionClient(endpoint).score_fixed(snippet);
}

TokenTrace complete_prefix(const std::string& snippet, double cut_fraction, const DecodingConfig& config,
                           const EndpointConfig& endpoint) {
    return CompletionClient(endpoint).complete_prefix(snippet, cut_fraction, config);
}

std::vector<Outcome<TokenTrace>> run_bounded(std::size_t n, int max_concurrent,
                                             const std::function<TokenTrace(std::size_t)>& job) {
    if (max_concurrent < 1) throw PreconditionError("max_concurrent must be at least 1");
    std::vector<Outcome<TokenTrace>> out(n);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                out[i].value = job(i);
            } catch (const std::exception& e) {
                out[i].error = e.what();
            }
        }
    };
    std::size_t threads = std::min<std::size_t>(n, static_cast<std::size_t>(max_concurrent));
    std::vector<std::thread> pool;
    for (std::size_t i = 1; i < threads; ++i) pool.emplace_back(worker);
    if (threads > 0) worker();
    for (auto& th : pool) th.join();
    return out;
}

std::vector<TokenTrace> parse_traces(const std::string& text) {
    std::vector<TokenTrace> out;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        auto nl = text.find('\n', pos);
        std::string line = text.substr(pos, nl == std::string::npos ? std::string::npos : nl - pos);
        pos = nl == std::string::npos ? text.size() : nl + 1;
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            out.push_back(parse_trace_record(line));
        } catch (const SchemaError& e) {
            throw SchemaError("line " + std::to_string(line_no) + ": " + e.what());
        } catch (const OffsetError& e) {
            throw OffsetError("line " + std::to_string(line_no) + ": " + e.what());
        } catch (const ReconstructionError& e) {
            throw ReconstructionError("line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return out;
}

std::vector<TokenTrace> read_traces(const std::filesystem::path& path) { return parse_traces(util::read_file(path)); }

std::string traces_jsonl(const std::vector<TokenTrace>& traces) {
    std::string out;
    for (const auto& t : traces) {
        out += serialize_trace(t);
        out += '\n';
    }
    return out;
}

void write_traces(const std::vector<TokenTrace>& traces, const std::filesystem::path& path) {
    util::write_atomic(path, traces_jsonl(traces));
}

}  // namespace psc::inference
