#include <doctest.h>

#include <filesystem>
#include <string>
#include <vector>

#include "psc/errors.hpp"
#include "psc/python/lexer.hpp"
#include "psc/smells/detect.hpp"
#include "psc/smells/diagnostics_io.hpp"
#include "psc/util/io.hpp"

using namespace psc;
using namespace psc::smells;
namespace fs = std::filesystem;

namespace {

std::vector<std::string> ids(const std::vector<SmellDiagnostic>& d) {
    std::vector<std::string> out;
    for (const auto& x : d) out.push_back(x.rule_id);
    return out;
}

std::vector<std::string> only(const std::string& rule, const std::string& src) {
    return ids(detect(src, RuleSet::of({rule})));
}

fs::path golden_dir() { return fs::path(PSC_TEST_DATA_DIR) / "corpus" / "golden"; }

}  // namespace

TEST_CASE("linter-confirmed examples") {
    auto unused = detect("import os\n\ndef f():\n    return 1\n");
    REQUIRE(ids(unused) == std::vector<std::string>{"W0611"});
    CHECK(unused[0].start_line == 1);
    CHECK(unused[0].symbol == "unused-import");
    CHECK(detect("def f():\n    return 1\n").empty());
    CHECK(ids(detect("x = 1 ")) == std::vector<std::string>{"C0103", "C0304"});
}

TEST_CASE("rule positives and negatives") {
    CHECK(only("C0301", std::string(101, 'x') + " = 1\n").size() == 1);
    CHECK(only("C0301", "x = 1\n").empty());
    CHECK(only("C0303", "x = 1  \ny = 2\n").size() == 1);
    CHECK(only("C0304", "x = 1").size() == 1);
    CHECK(only("C0304", "x = 1\n").empty());
    CHECK(only("C0305", "x = 1\n\n\n").size() == 1);
    CHECK(only("C0321", "if x: y = 1\n").size() == 1);
    CHECK(only("C0321", "x = 1; y = 2\n").size() == 1);
    CHECK(only("C0103", "def BadName():\n    pass\n").size() == 1);
    CHECK(only("C0103", "def good_name():\n    for i in range(3):\n        pass\n").empty());
    CHECK(only("C0415", "def f():\n    import os\n    return os\n").size() == 1);
    CHECK(only("R1705", "def f(x):\n    if x:\n        return 1\n    else:\n        return 2\n").size() == 1);
    CHECK(only("R1705", "def f(x):\n    if x:\n        y = 1\n    else:\n        return 2\n    return y\n").empty());
    CHECK(only("W0102", "def f(a=[]):\n    return a\n").size() == 1);
    CHECK(only("W0102", "def f(a=()):\n    return a\n").empty());
    CHECK(only("W0612", "def f():\n    x = 1\n    return 2\n").size() == 1);
    CHECK(only("W0613", "def f(a):\n    return 2\n").size() == 1);
    CHECK(only("W0719", "def f():\n    raise Exception('x')\n").size() == 1);
    CHECK(only("W0719", "def f():\n    raise ValueError('x')\n").empty());
}

TEST_CASE("unparseable snippet yields one syntax-error diagnostic") {
    auto d = detect("def f(:\n    pass\n");
    REQUIRE(d.size() == 1);
    CHECK(d[0].rule_id == kSyntaxErrorRule);
    CHECK(d[0].start_line == 1);
}

TEST_CASE("rule subsets") {
    CHECK_THROWS_AS(RuleSet::of({"X9999"}), PreconditionError);
    CHECK(symbol_of("W0611") == "unused-import");
    CHECK(symbol_of("nope").empty());
    CHECK(implemented_rules().size() == 13);
}

TEST_CASE("ordered, idempotent and localized over the golden corpus") {
    for (const auto& e : fs::directory_iterator(golden_dir())) {
        if (e.path().extension() != ".py") continue;
        auto src = util::read_file(e.path());
        auto a = detect(src, RuleSet::all(), e.path().stem().string());
        CHECK(a == detect(src, RuleSet::all(), e.path().stem().string()));
        python::LineIndex li(src);
        for (std::size_t i = 0; i < a.size(); ++i) {
            CHECK(a[i].start_line <= std::max(li.line_count(), 1));
            CHECK(a[i].sample_id == e.path().stem().string());
            if (i) CHECK_FALSE(diagnostic_less(a[i], a[i - 1]));
        }
    }
}

TEST_CASE("golden records ingest without schema errors") {
    std::size_t files = 0;
    for (const auto& e : fs::directory_iterator(golden_dir())) {
        if (e.path().extension() != ".json") continue;
        ++files;
        auto records = parse_diagnostics(util::read_file(e.path()));
        REQUIRE(records.size() == 1);
        CHECK(records[0].linter_version.has_value());
        CHECK_NOTHROW(ingest_diagnostics(e.path()));
    }
    CHECK(files == 50);
}

TEST_CASE("diagnostics parsing") {
    SUBCASE("single record") {
        auto r = parse_diagnostics(R"({"sample_id":"s","smells":[{"rule_id":"W0719","symbol":"broad-exception-raised",
            "start_line":2,"start_col":4,"end_line":2,"end_col":20,"message":"m"}]})");
        REQUIRE(r.size() == 1);
        REQUIRE(r[0].smells.size() == 1);
        CHECK(r[0].smells[0].end_col == 20);
        CHECK(r[0].smells[0].sample_id == "s");
    }
    SUBCASE("unknown rules pass through") {
        auto r = parse_diagnostics(R"({"sample_id":"s","smells":[{"rule_id":"X9999","symbol":"x","start_line":1,
            "start_col":0,"end_line":null,"end_col":null,"message":""}]})");
        CHECK(r[0].smells[0].rule_id == "X9999");
        CHECK_FALSE(r[0].smells[0].has_end());
    }
    SUBCASE("missing start_line") {
        CHECK_THROWS_AS(parse_diagnostics(R"({"sample_id":"s","smells":[{"rule_id":"W0611","symbol":"x",
            "start_col":0,"message":""}]})"),
                        SchemaError);
    }
    SUBCASE("array and JSONL forms") {
        std::string one = R"({"sample_id":"a","smells":[]})";
        std::string two = R"({"sample_id":"b","smells":[]})";
        CHECK(parse_diagnostics("[" + one + "," + two + "]").size() == 2);
        CHECK(parse_diagnostics(one + "\n" + two + "\n").size() == 2);
    }
    SUBCASE("json round trip") {
        DiagnosticsRecord rec{"s", detect("import os\nx = 1 ", RuleSet::all(), "s"), std::string("native")};
        auto back = parse_diagnostics(to_json(rec, 2));
        REQUIRE(back.size() == 1);
        CHECK(back[0].smells == rec.smells);
        CHECK(back[0].linter_version == rec.linter_version);
    }
}
