#pragma once

#include <atomic>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "psc/core/types.hpp"
#include "psc/inference/decoding.hpp"

namespace psc::inference {

/// Number of prefix tokens kept by a cut: max(1, floor(fraction * n)).
std::size_t prefix_token_count(std::size_t n_tokens, double cut_fraction);

/// Client for an OpenAI-compatible /v1/completions endpoint returning
/// per-token logprobs. Safe to share between threads.
class CompletionClient {
public:
    explicit CompletionClient(EndpointConfig endpoint);

    /// Teacher-forced scoring of the whole snippet (echo, no new tokens).
    /// Throws PreconditionError on an empty snippet, UnsupportedError when the
    /// endpoint returns no prompt logprobs and EndpointError on transport or
    /// HTTP failures after retries.
    TokenTrace score_fixed(const std::string& snippet, const std::string& sample_id = "") const;

    /// Keeps the first prefix_token_count() endpoint tokens and asks for a
    /// continuation. `prompt_header` is sent before the prefix and is not part
    /// of the trace; without a header the prefix is echoed and scored too.
    /// Throws EmptyCompletionError when nothing is generated.
    TokenTrace complete_prefix(const std::string& snippet, double cut_fraction, const DecodingConfig& config,
                               const std::string& sample_id = "", const std::string& prompt_header = "") const;

    /// Requests issued so far (including retries).
    std::size_t requests_sent() const noexcept { return requests_->load(); }

    const EndpointConfig& endpoint() const noexcept { return endpoint_; }

private:
    std::string post(const std::string& body) const;

    EndpointConfig endpoint_;
    std::shared_ptr<std::atomic<std::size_t>> requests_;
};

/// Convenience wrappers over a temporary client.
TokenTrace score_fixed(const std::string& snippet, const EndpointConfig& endpoint);
TokenTrace complete_prefix(const std::string& snippet, double cut_fraction, const DecodingConfig& config,
                           const EndpointConfig& endpoint);

template <class T>
struct Outcome {
    std::optional<T> value;
    std::string error;  // set when value is empty
};

/// Runs job(i) for i in [0, n) with at most `max_concurrent` running at once.
/// Failures are captured per job; results keep input order.
std::vector<Outcome<TokenTrace>> run_bounded(std::size_t n, int max_concurrent,
                                             const std::function<TokenTrace(std::size_t)>& job);

/// JSONL trace files. read_traces skips blank lines and reports the 1-based
/// line number of a malformed record.
std::vector<TokenTrace> read_traces(const std::filesystem::path& path);
std::vector<TokenTrace> parse_traces(const std::string& text);
void write_traces(const std::vector<TokenTrace>& traces, const std::filesystem::path& path);
std::string traces_jsonl(const std::vector<TokenTrace>& traces);

}  // namespace psc::inference
