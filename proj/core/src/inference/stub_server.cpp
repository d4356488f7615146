#include "psc/inference/stub_server.hpp"

#include <httplib.h>

#include <cctype>
#include <chrono>
#include <thread>

#include <json.hpp>

#include "psc/errors.hpp"
#include "psc/sect/transform.hpp"
#include "psc/util/random.hpp"

namespace psc::inference {

using nlohmann::json;

std::vector<std::string> stub_tokenize(std::string_view text) {
    std::vector<std::string> out;
    auto word = [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || (c & 0x80); };
    std::size_t i = 0;
    while (i < text.size()) {
        std::size_t j = i;
        if (text[i] == ' ' && i + 1 < text.size() && word(text[i + 1])) ++j;
        if (word(text[j])) {
            while (j < text.size() && word(text[j])) ++j;
        } else if (std::isspace(static_cast<unsigned char>(text[j]))) {
            while (j < text.size() && std::isspace(static_cast<unsigned char>(text[j]))) {
                // A space directly before a word belongs to that word.
                if (text[j] == ' ' && j + 1 < text.size() && word(text[j + 1]) && j > i) break;
                ++j;
            }
        } else {
            ++j;
        }
        out.emplace_back(text.substr(i, j - i));
        i = j;
    }
    return out;
}

double stub_logprob(std::string_view token) {
    return -0.01 - static_cast<double>(util::fnv1a(token) % 1000) * 0.003;
}

struct StubServer::Impl {
    httplib::Server server;
    std::thread thread;
    std::atomic<std::size_t> requests{0};
    std::atomic<std::size_t> in_flight{0};
    std::atomic<std::size_t> max_in_flight{0};
};

StubServer::StubServer(StubOptions options) : impl_(std::make_unique<Impl>()), options_(std::move(options)) {
    impl_->server.Post("/v1/completions", [this](const httplib::Request& req, httplib::Response& res) {
        std::size_t now = ++impl_->in_flight;
        std::size_t seen = impl_->max_in_flight.load();
        while (now > seen && !impl_->max_in_flight.compare_exchange_weak(seen, now)) {
        }
        if (options_.latency_ms > 0) std::this_thread::sleep_for(std::chrono::milliseconds(options_.latency_ms));
        int status = 200;
        std::string body = complete(req.body, status);
        res.status = status;
        res.set_content(body, "application/json");
        --impl_->in_flight;
    });
    impl_->server.Post("/substitute", [](const httplib::Request& req, httplib::Response& res) {
        try {
            auto j = json::parse(req.body);
            auto name = j.at("name").get<std::string>();
            sect::TableSubstituteProvider table;
            res.set_content(json{{"substitutes", table.substitutes(name, "")}}.dump(), "application/json");
        } catch (const json::exception& e) {
            res.status = 400;
            res.set_content(json{{"error", {{"message", e.what()}}}}.dump(), "application/json");
        }
    });
}

StubServer::~StubServer() { stop(); }

int StubServer::start(const std::string& host, int port) {
    host_ = host;
    port_ = port == 0 ? impl_->server.bind_to_any_port(host) : (impl_->server.bind_to_port(host, port) ? port : -1);
    if (port_ < 0) throw EndpointError("stub server could not bind " + host + ":" + std::to_string(port));
    impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
    impl_->server.wait_until_ready();
    return port_;
}

void StubServer::listen(const std::string& host, int port) {
    host_ = host;
    port_ = port;
    if (!impl_->server.listen(host, port)) throw EndpointError("stub server could not listen on " + host);
}

void StubServer::stop() {
    if (!impl_) return;
    impl_->server.stop();
    if (impl_->thread.joinable()) impl_->thread.join();
}

std::string StubServer::url() const { return "http://" + host_ + ":" + std::to_string(port_); }
std::size_t StubServer::requests() const noexcept { return impl_->requests.load(); }
std::size_t StubServer::max_in_flight() const noexcept { return impl_->max_in_flight.load(); }

namespace {

std::string continuation(const StubOptions& o, const std::string& prompt) {
    std::size_t best = 0;
    const std::string* doc = nullptr;
    for (const auto& d : o.documents) {
        for (std::size_t cut = d.size() - (d.empty() ? 0 : 1); cut > best; --cut) {
            if (prompt.size() >= cut && prompt.compare(prompt.size() - cut, cut, d, 0, cut) == 0) {
                best = cut;
                doc = &d;
                break;
            }
        }
    }
    return doc ? doc->substr(best) : o.fallback_completion;
}

}  // namespace

std::string StubServer::complete(const std::string& request_body, int& status) {
    std::size_t n = ++impl_->requests;
    auto error = [&](int code, const std::string& msg) {
        status = code;
        return json{{"error", {{"message", msg}}}}.dump();
    };
    if (static_cast<int>(n) <= options_.fail_first) return error(500, "stub failure");
    json req;
    try {
        req = json::parse(request_body);
    } catch (const json::exception& e) {
        return error(400, e.what());
    }
    for (const auto& f : options_.unsupported_fields) {
        if (req.contains(f)) return error(400, "unsupported parameter: " + f);
    }
    std::string prompt = req.value("prompt", "");
    int max_tokens = req.value("max_tokens", 16);
    bool echo = req.value("echo", false);
    bool logprobs = req.contains("logprobs") && !req["logprobs"].is_null();

    std::vector<std::string> gen;
    if (max_tokens > 0) {
        for (auto& t : stub_tokenize(continuation(options_, prompt))) {
            if (static_cast<int>(gen.size()) >= max_tokens) break;
            gen.push_back(std::move(t));
        }
    }
    bool instructed = !options_.instruction_marker.empty() && prompt.find(options_.instruction_marker) != std::string::npos;
    auto generated_lp = [&](const std::string& t) {
        if (options_.fixed_logprob) return *options_.fixed_logprob;
        if (instructed && options_.instructed_completion_logprob) return *options_.instructed_completion_logprob;
        if (options_.completion_logprob) return *options_.completion_logprob;
        auto it = options_.logprob_overrides.find(t);
        return it != options_.logprob_overrides.end() ? it->second : stub_logprob(t);
    };
    auto prompt_lp = [&](const std::string& t) {
        if (options_.fixed_logprob) return *options_.fixed_logprob;
        auto it = options_.logprob_overrides.find(t);
        return it != options_.logprob_overrides.end() ? it->second : stub_logprob(t);
    };

    json tokens = json::array();
    json lps = json::array();
    json offsets = json::array();
    std::string text;
    std::size_t offset = 0;
    if (echo) {
        text = prompt;
        auto pt = stub_tokenize(prompt);
        for (std::size_t i = 0; i < pt.size(); ++i) {
            tokens.push_back(pt[i]);
            lps.push_back(i == 0 ? json(nullptr) : json(prompt_lp(pt[i])));
            offsets.push_back(offset);
            offset += pt[i].size();
        }
    }
    offset = prompt.size();
    for (const auto& t : gen) {
        text += t;
        tokens.push_back(t);
        lps.push_back(generated_lp(t));
        offsets.push_back(offset);
        offset += t.size();
    }
    json choice = {{"index", 0}, {"text", text}, {"finish_reason", gen.empty() ? "stop" : "length"}};
    bool scoring_only = echo && max_tokens == 0;
    if (logprobs && (options_.prompt_logprobs || !scoring_only)) {
        choice["logprobs"] = {{"tokens", tokens}, {"token_logprobs", lps}, {"text_offset", offsets}, {"top_logprobs", nullptr}};
    } else {
        choice["logprobs"] = nullptr;
    }
    status = 200;
    return json{{"id", "stub-" + std::to_string(n)},
                {"object", "text_completion"},
                {"model", req.value("model", options_.model)},
                {"choices", json::array({choice})}}
        .dump();
}

}  // namespace psc::inference
