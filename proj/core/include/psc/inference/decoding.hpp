#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace psc::inference {

enum class Strategy { greedy, beam, sampling, contrastive, top_k, top_p };

std::string_view to_string(Strategy s) noexcept;
std::optional<Strategy> parse_strategy(std::string_view name) noexcept;

/// Decoding parameters. Strategy-specific fields are set exactly when the
/// strategy uses them; for_strategy() fills the defaults.
struct DecodingConfig {
    Strategy strategy = Strategy::greedy;
    std::optional<int> num_beams;         // beam
    std::optional<bool> early_stopping;   // beam
    std::optional<double> penalty_alpha;  // contrastive
    std::optional<int> top_k;             // contrastive, top_k
    std::optional<double> top_p;          // top_p
    double temperature = 1.0;
    int max_new_tokens = 256;
    std::optional<std::uint64_t> seed;

    static DecodingConfig for_strategy(Strategy s);

    /// Throws ConfigError when a field is out of range or present for a
    /// strategy that does not use it (or missing for one that does).
    void validate() const;

    /// Stable identifier, e.g. "beam(num_beams=5,early_stopping=true)".
    std::string id() const;
};

/// Where completions come from. The API key is read from PSC_API_KEY when unset.
struct EndpointConfig {
    std::string base_url;
    std::optional<std::string> api_key;
    std::string model;
    double request_timeout_seconds = 60;
    int max_concurrent = 4;
    int retries = 2;
    double backoff_seconds = 0.2;

    void validate() const;
};

}  // namespace psc::inference
