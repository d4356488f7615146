#include <doctest.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <numeric>

#include "psc/core/validate.hpp"
#include "psc/errors.hpp"
#include "psc/inference/client.hpp"
#include "psc/inference/stub_server.hpp"

using namespace psc;
using namespace psc::inference;

namespace {

EndpointConfig endpoint_for(const StubServer& server) {
    EndpointConfig e;
    e.base_url = server.url();
    e.model = "stub-model";
    e.api_key = "test";
    e.backoff_seconds = 0.01;
    return e;
}

std::filesystem::path temp_file(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / "psc_test_inference";
    std::filesystem::create_directories(dir);
    return dir / name;
}

}  // namespace

TEST_CASE("stub tokenizer") {
    CHECK(stub_tokenize("a = 1").size() == 4);
    auto toks = stub_tokenize("def f(x):\n    return x\n");
    CHECK(std::accumulate(toks.begin(), toks.end(), std::string{}) == "def f(x):\n    return x\n");
    double lp = stub_logprob("token");
    CHECK(lp <= -0.01);
    CHECK(lp >= -3.01);
    CHECK(stub_logprob("token") == lp);
}

TEST_CASE("prefix cut") {
    CHECK(prefix_token_count(2, 0.999) == 1);
    CHECK(prefix_token_count(10, 0.5) == 5);
    CHECK(prefix_token_count(10, 0.01) == 1);
    for (std::size_t n = 1; n < 60; ++n) {
        for (double f : {0.001, 0.1, 0.25, 0.5, 0.75, 0.999}) {
            auto k = prefix_token_count(n, f);
            CHECK(k >= 1);
            CHECK(k <= n);
            CHECK(k == std::max<std::size_t>(1, static_cast<std::size_t>(f * n)));
        }
    }
}

TEST_CASE("decoding config") {
    auto beam = DecodingConfig::for_strategy(Strategy::beam);
    CHECK_NOTHROW(beam.validate());
    CHECK(beam.id().rfind("beam(", 0) == 0);
    CHECK(DecodingConfig::for_strategy(Strategy::greedy).id() != beam.id());
    auto bad = DecodingConfig::for_strategy(Strategy::greedy);
    bad.num_beams = 3;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    auto p = DecodingConfig::for_strategy(Strategy::top_p);
    p.top_p = 1.5;
    CHECK_THROWS_AS(p.validate(), ConfigError);
    for (auto s : {Strategy::greedy, Strategy::beam, Strategy::sampling, Strategy::contrastive, Strategy::top_k,
                   Strategy::top_p}) {
        CHECK(parse_strategy(to_string(s)) == s);
        CHECK_NOTHROW(DecodingConfig::for_strategy(s).validate());
    }
    CHECK_FALSE(parse_strategy("nucleus").has_value());
    EndpointConfig e;
    CHECK_THROWS_AS(e.validate(), ConfigError);
}

TEST_CASE("fixed scoring against the stub") {
    StubServer server;
    server.start();
    CompletionClient client(endpoint_for(server));

    auto t = client.score_fixed("a = 1", "s1");
    CHECK(t.sample_id == "s1");
    CHECK(t.size() == 4);
    CHECK(t.source == "a = 1");
    CHECK_FALSE(t.generated_from.has_value());
    CHECK(t.tokens[0].logprob == 0.0);
    for (std::size_t i = 1; i < t.size(); ++i)
        CHECK(t.tokens[i].logprob == doctest::Approx(stub_logprob(t.tokens[i].text)));
    CHECK_NOTHROW(validate_trace(t));
    CHECK_THROWS_AS(client.score_fixed(""), PreconditionError);
}

TEST_CASE("invalid logprobs are rejected") {
    StubOptions o;
    o.fixed_logprob = 0.5;
    StubServer server(o);
    server.start();
    CHECK_THROWS_AS(CompletionClient(endpoint_for(server)).score_fixed("a = 1"), SchemaError);
}

TEST_CASE("prefix completion") {
    std::string doc = "x = 1\ny = 2\nz = 3\n";
    StubOptions o;
    o.documents = {doc};
    StubServer server(o);
    server.start();
    CompletionClient client(endpoint_for(server));

    auto toks = stub_tokenize(doc);
    REQUIRE(toks.size() >= 10);
    std::string ten;
    for (int i = 0; i < 10; ++i) ten += toks[i];
    std::size_t five = 0;
    for (int i = 0; i < 5; ++i) five += toks[i].size();

    auto greedy = DecodingConfig::for_strategy(Strategy::greedy);
    auto t = client.complete_prefix(ten, 0.5, greedy, "s");
    REQUIRE(t.generated_from.has_value());
    CHECK(*t.generated_from == five);
    CHECK(t.source == doc);
    CHECK_NOTHROW(validate_trace(t));
    CHECK(client.complete_prefix(ten, 0.5, greedy, "s") == t);

    auto with_header = client.complete_prefix(ten, 0.5, greedy, "s", "# write code\n");
    CHECK(with_header.source.rfind("# write code", 0) == std::string::npos);
}

TEST_CASE("retries and unsupported features") {
    StubOptions flaky;
    flaky.fail_first = 2;
    StubServer server(flaky);
    server.start();
    auto e = endpoint_for(server);
    CompletionClient client(e);
    CHECK(client.score_fixed("a = 1").size() == 4);
    CHECK(client.requests_sent() == 3);

    StubOptions worse;
    worse.fail_first = 10;
    StubServer down(worse);
    down.start();
    CHECK_THROWS_AS(CompletionClient(endpoint_for(down)).score_fixed("a = 1"), EndpointError);

    StubOptions no_beams;
    no_beams.unsupported_fields = {"num_beams"};
    StubServer limited(no_beams);
    limited.start();
    CompletionClient lc(endpoint_for(limited));
    CHECK_THROWS_AS(lc.complete_prefix("a = 1\n", 0.5, DecodingConfig::for_strategy(Strategy::beam)),
                    UnsupportedError);
    CHECK_NOTHROW(lc.complete_prefix("a = 1\n", 0.5, DecodingConfig::for_strategy(Strategy::greedy)));

    StubOptions blind;
    blind.prompt_logprobs = false;
    StubServer nolp(blind);
    nolp.start();
    CHECK_THROWS_AS(CompletionClient(endpoint_for(nolp)).score_fixed("a = 1"), UnsupportedError);
}

TEST_CASE("bounded concurrency") {
    StubOptions o;
    o.latency_ms = 30;
    StubServer server(o);
    server.start();
    auto e = endpoint_for(server);
    e.max_concurrent = 2;
    CompletionClient client(e);
    auto results = run_bounded(8, e.max_concurrent, [&](std::size_t i) {
        if (i == 3) throw EndpointError("boom");
        return client.score_fixed("v" + std::to_string(i) + " = 1", std::to_string(i));
    });
    REQUIRE(results.size() == 8);
    CHECK(server.max_in_flight() <= 2);
    CHECK_FALSE(results[3].value.has_value());
    CHECK(results[3].error.find("boom") != std::string::npos);
    for (std::size_t i = 0; i < 8; ++i)
        if (i != 3) CHECK(results[i].value->sample_id == std::to_string(i));
}

TEST_CASE("trace files") {
    TokenTrace a;
    a.sample_id = "a";
    a.source = "x = 1";
    a.tokens = {{"x", 0, 1, -0.5}, {" = 1", 1, 5, -1.25}};
    a.meta["level"] = "greedy";
    TokenTrace b = a;
    b.sample_id = "b";
    b.generated_from = 1;

    auto path = temp_file("traces.jsonl");
    write_traces({a, b}, path);
    auto back = read_traces(path);
    REQUIRE(back.size() == 2);
    CHECK(back[0] == a);
    CHECK(back[1] == b);
    CHECK(parse_traces(traces_jsonl({a, b})) == back);

    {
        std::ofstream f(temp_file("empty.jsonl"));
    }
    CHECK(read_traces(temp_file("empty.jsonl")).empty());

    std::string text = traces_jsonl({a}) + "{\"sample_id\": 3}\n";
    try {
        parse_traces(text);
        FAIL("expected an error");
    } catch (const std::exception& ex) {
        CHECK(std::string(ex.what()).find("line 2") != std::string::npos);
    }
}
