#pragma once

#include <atomic>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace psc::inference {

/// Splits text the way the stub endpoint does: words and numbers with an
/// optional leading space, whitespace runs, and single other characters.
std::vector<std::string> stub_tokenize(std::string_view text);

/// Deterministic logprob in [-3.01, -0.01] derived from the token text.
double stub_logprob(std::string_view token);

struct StubOptions {
    std::string model = "stub-model";
    /// Continuations: a prompt ending with a prefix of a document continues
    /// with the rest of that document.
    std::vector<std::string> documents;
    std::string fallback_completion = "\n    pass\n";
    std::map<std::string, double> logprob_overrides;  // by token text
    std::optional<double> fixed_logprob;               // every token, may be invalid on purpose
    std::optional<double> completion_logprob;          // generated tokens
    /// Generated tokens when the prompt contains `instruction_marker`.
    std::optional<double> instructed_completion_logprob;
    std::string instruction_marker = "code smells";
    std::set<std::string> unsupported_fields;  // rejected with HTTP 400
    bool prompt_logprobs = true;               // false: echo requests get no logprobs
    int fail_first = 0;                        // answer HTTP 500 to the first n requests
    int latency_ms = 0;
};

/// In-process OpenAI-compatible completions endpoint for hermetic tests.
/// Also answers POST /substitute for rename suggestions.
class StubServer {
public:
    explicit StubServer(StubOptions options = {});
    ~StubServer();
    StubServer(const StubServer&) = delete;
    StubServer& operator=(const StubServer&) = delete;

    /// Binds to host:port (0 picks a free port) and serves on a background thread.
    int start(const std::string& host = "127.0.0.1", int port = 0);
    /// Serves on the calling thread until stop().
    void listen(const std::string& host, int port);
    void stop();

    std::string url() const;
    int port() const noexcept { return port_; }
    std::size_t requests() const noexcept;
    std::size_t max_in_flight() const noexcept;

    /// The JSON response body for a completions request body (no HTTP involved).
    std::string complete(const std::string& request_body, int& status);

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    StubOptions options_;
    std::string host_;
    int port_ = 0;
};

}  // namespace psc::inference
