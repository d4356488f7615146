#include <doctest.h>

#include <cmath>
#include <random>

#include "psc/errors.hpp"
#include "psc/infogain/infogain.hpp"
#include "psc/util/random.hpp"

using namespace psc;
using namespace psc::infogain;

namespace {

constexpr auto H = SeverityLabel::high;
constexpr auto L = SeverityLabel::low;

double h2(double p) { return -(p * std::log2(p) + (1 - p) * std::log2(1 - p)); }

}  // namespace

TEST_CASE("severity labels") {
    CHECK(severity_of(6, 10) == H);
    CHECK(severity_of(5, 10) == L);
    CHECK(severity_of(0, 0) == L);
    auto c = label_severity(10, {{0, 3}, {2, 5}, {9, 9}});
    CHECK(c.n_s == 7);
    CHECK(c.label == H);
    CHECK(label_severity(10, {}).n_s == 0);

    TokenTrace t;
    t.sample_id = "s";
    t.source = "import os\n";
    t.tokens = {{"import", 0, 6, -0.1}, {" os", 6, 9, -0.1}, {"\n", 9, 10, -0.1}};
    SmellDiagnostic d;
    d.sample_id = "s";
    d.rule_id = "W0611";
    d.start_line = 1;
    d.start_col = 0;
    d.end_line = 1;
    d.end_col = 9;
    auto r = label_severity(t, {d, d});
    CHECK(r.n_s == 2);
    CHECK(r.n_t == 3);
    CHECK(r.label == H);
}

TEST_CASE("entropy and information gain examples") {
    CHECK(entropy_bits({H, L}) == doctest::Approx(1.0));
    CHECK(entropy_bits({H, H}) == 0.0);
    std::vector<SeverityLabel> five{H, H, H, H, H, L, L, L, L, L};
    CHECK(information_gain(five, {9, 8, 7, 6, 5, 4, 3, 2, 1, 0}) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(information_gain(five, std::vector<double>(10, 0.5)) == 0.0);
    std::vector<SeverityLabel> mixed{H, H, H, H, L, H, L, L, L, L};
    CHECK(information_gain(mixed, {9, 8, 7, 6, 5, 4, 3, 2, 1, 0}, 2) == doctest::Approx(1 - h2(0.8)).epsilon(1e-12));
    CHECK(information_gain({H, H, H}, {1, 2, 3}) == 0.0);
    CHECK_THROWS(information_gain({H, L}, {1.0}));
}

TEST_CASE("information gain is bounded and rank based") {
    std::mt19937_64 rng(util::derive_seed(2, "ig"));
    for (int round = 0; round < 200; ++round) {
        std::vector<SeverityLabel> labels;
        std::vector<double> x, y;
        for (std::size_t n = 5 + util::uniform_below(rng, 100); n > 0; --n) {
            labels.push_back(util::uniform01(rng) < 0.4 ? H : L);
            x.push_back(std::floor(10 * util::uniform01(rng)));
            y.push_back(std::exp(x.back()) - 3);
        }
        double ig = information_gain(labels, x);
        CHECK(ig >= 0.0);
        CHECK(ig <= entropy_bits(labels) + 1e-12);
        CHECK(information_gain(labels, y) == doctest::Approx(ig).epsilon(1e-12));
    }
}

TEST_CASE("bleu") {
    std::vector<std::string> ref{"a", "b", "c", "d", "e", "f", "g", "h"};
    CHECK(bleu(ref, ref) == doctest::Approx(1.0));
    CHECK(bleu({"x", "y", "z", "w"}, ref) == 0.0);
    CHECK(bleu({"a", "b", "c", "d"}, ref) == doctest::Approx(std::exp(1.0 - 2.0)).epsilon(1e-12));
    CHECK(bleu({}, ref) == 0.0);
    double partial = bleu({"a", "b", "x", "d", "e", "f", "y", "h"}, ref);
    CHECK(partial > 0.0);
    CHECK(partial < 1.0);
}

TEST_CASE("severity dataset io and report") {
    SeverityDataset data;
    std::mt19937_64 rng(util::derive_seed(3, "ig-report"));
    for (int i = 0; i < 200; ++i) {
        double latent = util::standard_normal(rng);
        SeverityRow r;
        r.sample_id = "s" + std::to_string(i);
        r.rule_id = i % 2 ? "W0611" : "C0303";
        r.n_t = 100;
        r.n_s = latent > 0 ? 60 : 20;
        r.severity = severity_of(r.n_s, r.n_t);
        r.metrics = {{"a", latent + 0.3 * util::standard_normal(rng)}, {"b", util::standard_normal(rng)}};
        r.metrics["a_copy"] = r.metrics["a"];
        data.rows.push_back(r);
    }
    data.rows.push_back({"lonely", "R1705", 1, 10, L, {{"a", 0}, {"b", 0}, {"a_copy", 0}}});

    auto back = parse_severity_csv(severity_csv(data));
    REQUIRE(back.rows.size() == data.rows.size());
    CHECK(back.rows[5].metrics == data.rows[5].metrics);
    CHECK(back.rows[5].severity == data.rows[5].severity);

    std::vector<std::string> warnings;
    auto rows = ig_report(data, {"a", "b", "a_copy"}, kDefaultBins, &warnings);
    CHECK(warnings.size() == 1);
    REQUIRE(rows.size() == 6);
    std::map<std::pair<std::string, std::string>, double> ig;
    for (const auto& r : rows) {
        ig[{r.rule_id, r.metric}] = r.ig_bits;
        CHECK(r.n == 100);
        CHECK(r.ig_bits <= r.h_s_bits + 1e-12);
    }
    for (const char* rule : {"W0611", "C0303"}) {
        CHECK(ig[{rule, "a"}] > ig[{rule, "b"}]);
        CHECK(ig[{rule, "a"}] == ig[{rule, "a_copy"}]);
    }
    CHECK_THROWS_AS(ig_report(data, {"missing"}), SchemaError);
    CHECK(ig_csv(rows).rfind("rule_id,metric,ig_bits,h_s_bits,n\n", 0) == 0);

    merge_metrics_csv(data, "sample_id,rule_id,metric_name,value\ns0,C0303,bleu,0.25\n");
    CHECK(data.rows[0].metrics.at("bleu") == 0.25);
}
