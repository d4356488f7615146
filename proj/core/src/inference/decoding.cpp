#include "psc/inference/decoding.hpp"

#include "psc/errors.hpp"
#include "psc/util/csv.hpp"
#include "psc/util/url.hpp"

namespace psc::inference {

std::string_view to_string(Strategy s) noexcept {
    switch (s) {
        case Strategy::greedy:
            return "greedy";
        case Strategy::beam:
            return "beam";
        case Strategy::sampling:
            return "sampling";
        case Strategy::contrastive:
            return "contrastive";
        case Strategy::top_k:
            return "top_k";
        case Strategy::top_p:
            return "top_p";
    }
    return "?";
}

std::optional<Strategy> parse_strategy(std::string_view name) noexcept {
    for (auto s : {Strategy::greedy, Strategy::beam, Strategy::sampling, Strategy::contrastive, Strategy::top_k,
                   Strategy::top_p}) {
        if (to_string(s) == name) return s;
    }
    return std::nullopt;
}

DecodingConfig DecodingConfig::for_strategy(Strategy s) {
    DecodingConfig c;
    c.strategy = s;
    switch (s) {
        case Strategy::beam:
            c.num_beams = 5;
            c.early_stopping = true;
            break;
        case Strategy::contrastive:
            c.penalty_alpha = 0.6;
            c.top_k = 4;
            break;
        case Strategy::top_k:
            c.top_k = 50;
            break;
        case Strategy::top_p:
            c.top_p = 0.9;
            break;
        default:
            break;
    }
    return c;
}

void DecodingConfig::validate() const {
    auto expect = [&](bool present, bool wanted, const char* field) {
        if (present != wanted) {
            throw ConfigError(std::string(field) + (wanted ? " is required for " : " is not used by ") +
                              std::string(to_string(strategy)));
        }
    };
    expect(num_beams.has_value(), strategy == Strategy::beam, "num_beams");
    expect(early_stopping.has_value(), strategy == Strategy::beam, "early_stopping");
    expect(penalty_alpha.has_value(), strategy == Strategy::contrastive, "penalty_alpha");
    expect(top_k.has_value(), strategy == Strategy::contrastive || strategy == Strategy::top_k, "top_k");
    expect(top_p.has_value(), strategy == Strategy::top_p, "top_p");
    if (num_beams && *num_beams < 1) throw ConfigError("num_beams must be positive");
    if (penalty_alpha && !(*penalty_alpha >= 0 && *penalty_alpha <= 1)) throw ConfigError("penalty_alpha must be in [0, 1]");
    if (top_k && *top_k < 1) throw ConfigError("top_k must be positive");
    if (top_p && !(*top_p > 0 && *top_p <= 1)) throw ConfigError("top_p must be in (0, 1]");
    if (!(temperature > 0)) throw ConfigError("temperature must be positive");
    if (max_new_tokens < 1) throw ConfigError("max_new_tokens must be positive");
}

std::string DecodingConfig::id() const {
    std::string out(to_string(strategy));
    std::string args;
    auto add = [&](const std::string& kv) { args += (args.empty() ? "" : ",") + kv; };
    if (num_beams) add("num_beams=" + std::to_string(*num_beams));
    if (early_stopping) add(std::string("early_stopping=") + (*early_stopping ? "true" : "false"));
    if (penalty_alpha) add("penalty_alpha=" + util::format_double(*penalty_alpha));
    if (top_k) add("top_k=" + std::to_string(*top_k));
    if (top_p) add("top_p=" + util::format_double(*top_p));
    if (strategy != Strategy::greedy && strategy != Strategy::beam && temperature != 1.0) {
        add("temperature=" + util::format_double(temperature));
    }
    return args.empty() ? out : out + "(" + args + ")";
}

void EndpointConfig::validate() const {
    (void)util::split_url(base_url);
    if (max_concurrent < 1) throw ConfigError("max_concurrent must be at least 1");
    if (retries < 0) throw ConfigError("retries must be non-negative");
    if (!(request_timeout_seconds > 0)) throw ConfigError("request timeout must be positive");
}

}  // namespace psc::inference
