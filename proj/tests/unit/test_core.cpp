#include <doctest.h>

#include <json.hpp>

#include "psc/core/types.hpp"
#include "psc/core/validate.hpp"
#include "psc/errors.hpp"

using namespace psc;
using nlohmann::json;

namespace {

std::string record(const std::string& source, const json& tokens, const json& generated_from = nullptr) {
    return json{{"sample_id", "s"}, {"source", source}, {"generated_from", generated_from}, {"meta", json::object()},
                {"tokens", tokens}}
        .dump();
}

}  // namespace

TEST_CASE("well-formed record validates") {
    auto t = parse_trace_record(record("a=", json::array({{{"text", "a"}, {"byte_start", 0}, {"byte_end", 1}, {"logprob", -0.1}},
                                                          {{"text", "="}, {"byte_start", 1}, {"byte_end", 2}, {"logprob", -0.2}}})));
    CHECK(t.size() == 2);
    CHECK(t.tokens[1].prob() == doctest::Approx(std::exp(-0.2)));
    CHECK(covered_bytes(t) == 2);
    CHECK_FALSE(t.generated_from);
}

TEST_CASE("overlapping spans raise OffsetError") {
    auto r = record("abcde", json::array({{{"text", "abc"}, {"byte_start", 0}, {"byte_end", 3}, {"logprob", -0.1}},
                                          {{"text", "cde"}, {"byte_start", 2}, {"byte_end", 5}, {"logprob", -0.1}}}));
    CHECK_THROWS_AS(parse_trace_record(r), OffsetError);
}

TEST_CASE("token text disagreeing with source raises ReconstructionError") {
    auto r = record("a=", json::array({{{"text", "a"}, {"byte_start", 0}, {"byte_end", 1}, {"logprob", -0.1}},
                                       {{"text", "+"}, {"byte_start", 1}, {"byte_end", 2}, {"logprob", -0.2}}}));
    CHECK_THROWS_AS(parse_trace_record(r), ReconstructionError);
}

TEST_CASE("schema violations") {
    SUBCASE("missing field") {
        json j = json::parse(record("a", json::array()));
        j.erase("source");
        CHECK_THROWS_AS(parse_trace_record(j.dump()), SchemaError);
    }
    SUBCASE("probability above one") {
        auto r = record("a", json::array({{{"text", "a"}, {"byte_start", 0}, {"byte_end", 1}, {"logprob", 0.5}}}));
        CHECK_THROWS_AS(parse_trace_record(r), SchemaError);
    }
    SUBCASE("non-json") { CHECK_THROWS_AS(parse_trace_record("{"), SchemaError); }
    SUBCASE("span past the source") {
        auto r = record("a", json::array({{{"text", "ab"}, {"byte_start", 0}, {"byte_end", 2}, {"logprob", -1}}}));
        CHECK_THROWS_AS(parse_trace_record(r), OffsetError);
    }
}

TEST_CASE("zero-width special tokens are allowed") {
    auto t = parse_trace_record(record("a", json::array({{{"text", ""}, {"byte_start", 0}, {"byte_end", 0}, {"logprob", -0.5}},
                                                         {{"text", "a"}, {"byte_start", 0}, {"byte_end", 1}, {"logprob", 0.0}}})));
    CHECK(t.tokens[0].zero_width());
    CHECK(covered_bytes(t) == 1);
}

TEST_CASE("serialize round-trips") {
    TokenTrace t;
    t.sample_id = "x\"1";
    t.source = "é = 1\n";
    t.generated_from = 2;
    t.meta = {{"model", "m"}, {"decoding", "greedy"}};
    t.tokens = {{"é", 0, 2, -0.25}, {" =", 2, 4, -1e-300}, {" 1", 4, 6, 0.0}, {"\n", 6, 7, -3.5}};
    auto once = validate_trace(t);
    CHECK(parse_trace_record(serialize_trace(once)) == once);
    CHECK(serialize_trace(parse_trace_record(serialize_trace(once))) == serialize_trace(once));
}

TEST_CASE("diagnostic order") {
    std::vector<SmellDiagnostic> d(3);
    d[0].rule_id = "W0611", d[0].start_line = 2;
    d[1].rule_id = "C0304", d[1].start_line = 2;
    d[2].rule_id = "C0303", d[2].start_line = 1, d[2].start_col = 5;
    sort_diagnostics(d);
    CHECK(d[0].rule_id == "C0303");
    CHECK(d[1].rule_id == "C0304");
    CHECK(d[2].rule_id == "W0611");
}
