#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <csignal>
#include <filesystem>
#include <iostream>

#include "psc/inference/stub_server.hpp"
#include "psc/util/io.hpp"

namespace {

psc::inference::StubServer* g_server = nullptr;

void on_signal(int) {
    if (g_server) g_server->stop();
}

}  // namespace

int main(int argc, char** argv) {
    namespace fs = std::filesystem;
    CLI::App app{"Local completions endpoint with deterministic logprobs", "psc-stub-server"};
    std::string host = "127.0.0.1";
    int port = 8089;
    std::string documents;
    std::optional<double> completion_p;
    std::optional<double> instructed_p;
    psc::inference::StubOptions options;

    app.add_option("--host", host, "Bind address")->capture_default_str();
    app.add_option("--port", port, "Port (0 picks a free one)")->capture_default_str();
    app.add_option("--model", options.model, "Reported model name")->capture_default_str();
    app.add_option("--documents", documents, "Directory of .py files used as continuations")
        ->check(CLI::ExistingDirectory);
    app.add_option("--completion-prob", completion_p, "Probability of every generated token")
        ->check(CLI::Range(1e-12, 1.0));
    app.add_option("--instructed-prob", instructed_p,
                   "Probability of generated tokens when the prompt asks to avoid code smells")
        ->check(CLI::Range(1e-12, 1.0));
    app.add_option("--fallback", options.fallback_completion, "Completion when no document matches");
    app.add_option("--latency-ms", options.latency_ms, "Delay added to every response")->capture_default_str();
    app.add_option("--fail-first", options.fail_first, "Answer HTTP 500 to the first N requests")
        ->capture_default_str();
    CLI11_PARSE(app, argc, argv);

    if (!documents.empty()) {
        std::vector<fs::path> files;
        for (const auto& e : fs::directory_iterator(documents))
            if (e.is_regular_file() && e.path().extension() == ".py") files.push_back(e.path());
        std::sort(files.begin(), files.end());
        for (const auto& f : files) options.documents.push_back(psc::util::read_file(f));
    }
    if (completion_p) options.completion_logprob = std::log(*completion_p);
    if (instructed_p) options.instructed_completion_logprob = std::log(*instructed_p);

    psc::inference::StubServer server(options);
    g_server = &server;
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    std::cout << "listening on http://" << host << ":" << port << std::endl;
    server.listen(host, port);
    return 0;
}
