#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "psc/causal/causal.hpp"
#include "psc/causal/features.hpp"
#include "psc/errors.hpp"
#include "psc/util/random.hpp"

using namespace psc;
using namespace psc::causal;

namespace {

ExperimentFrame scm(std::uint64_t seed, double effect, int n = 2000, bool hide_z = false) {
    std::mt19937_64 rng(seed);
    ExperimentFrame f;
    f.feature_names = {"z", "w"};
    for (int i = 0; i < n; ++i) {
        double z = util::standard_normal(rng);
        double w = util::standard_normal(rng);
        bool t = util::uniform01(rng) < 1 / (1 + std::exp(-2 * z));
        double y = effect * t + 0.5 * z + 0.1 * util::standard_normal(rng);
        f.rows.push_back({"s" + std::to_string(i), "W0611", "T1", t ? "beam" : "greedy", y, y / 2,
                          {hide_z ? 0.0 : z, w}});
    }
    return f;
}

}  // namespace

TEST_CASE("features of a tiny snippet") {
    auto f = extract_features("x = 1\n");
    CHECK(f.loc == 1);
    CHECK(f.identifiers == 1);
    CHECK(f.pos_counts[PosTag::numeral] == 1);
    CHECK(f.syntax_errors == 0);
    for (double v : feature_values(extract_features(""))) CHECK(v == 0.0);
    auto clean = extract_features("def f(a):\n    return a\n");
    auto trailing = extract_features("def f(a):  \n    return a\n");
    CHECK(trailing.whitespace_count != clean.whitespace_count);
    trailing.whitespace_count = clean.whitespace_count;
    CHECK(trailing == clean);
    CHECK(extract_features("def f(:\n").syntax_errors == 1);
    CHECK(feature_names().size() == feature_values(clean).size());
    auto pos = parse_pos_annotations("sample_id,noun,verb\ns1,3,2\n");
    CHECK(pos.at("s1").at(PosTag::verb) == 2);
    CHECK(extract_features("x = 1\n", PosCounts{{PosTag::noun, 7}}).pos_counts.at(PosTag::noun) == 7);
}

TEST_CASE("spearman") {
    CHECK(spearman({1, 2, 3, 4}, {8, 6, 4, 2}) == doctest::Approx(-1.0));
    CHECK(spearman({1, 2, 3}, {5, 5, 5}) == 0.0);
    CHECK(spearman({1, 2, 2, 3}, {1, 2, 2, 3}) == doctest::Approx(1.0));
}

TEST_CASE("regression recovers a planted coefficient") {
    auto f = scm(11, 0.3);
    auto r = estimate_ate(f, "beam", "greedy");
    CHECK(r.ate == doctest::Approx(0.3).epsilon(0.1));
    CHECK(r.se > 0);
    CHECK(r.n_treated + r.n_control == f.rows.size());
    CHECK(r.rho > 0);
    CHECK_FALSE(r.ridge);
    CHECK(std::fabs(estimate_ate(scm(12, 0.0), "beam", "greedy").ate) < 0.02);
}

TEST_CASE("estimates are linear in the outcome and ignore row order") {
    auto f = scm(13, 0.3);
    double base = estimate_ate(f, "beam", "greedy").ate;
    auto shifted = f, scaled = f, shuffled = f;
    for (auto& r : shifted.rows) r.y1 += 5;
    for (auto& r : scaled.rows) r.y1 *= -2;
    std::mt19937_64 rng(1);
    util::shuffle(shuffled.rows, rng);
    CHECK(estimate_ate(shifted, "beam", "greedy").ate == doctest::Approx(base).epsilon(1e-9));
    CHECK(estimate_ate(scaled, "beam", "greedy").ate == doctest::Approx(-2 * base).epsilon(1e-9));
    CHECK(estimate_ate(shuffled, "beam", "greedy").ate == doctest::Approx(base).epsilon(1e-9));
    EstimateOptions y0;
    y0.outcome = Outcome::y0;
    CHECK(estimate_ate(f, "beam", "greedy", y0).ate == doctest::Approx(base / 2).epsilon(1e-9));
}

TEST_CASE("collinear confounders fall back to ridge") {
    auto f = scm(14, 0.3, 500);
    f.feature_names.push_back("z_again");
    for (auto& r : f.rows) r.features.push_back(2 * r.features[0]);
    auto r = estimate_ate(f, "beam", "greedy");
    CHECK(r.ridge);
    CHECK(r.ate == doctest::Approx(0.3).epsilon(0.2));
}

TEST_CASE("too few rows") {
    auto f = scm(15, 0.3, 40);
    CHECK_THROWS_AS(estimate_ate(f, "beam", "greedy"), InsufficientDataError);
    EstimateOptions loose;
    loose.min_rows = 2;
    CHECK_NOTHROW(estimate_ate(f, "beam", "greedy", loose));
}

TEST_CASE("refutations") {
    auto f = scm(16, 0.3);
    auto r = estimate_ate(f, "beam", "greedy");
    refute(f, r);
    REQUIRE(r.refutations.size() == 4);
    CHECK(std::fabs(r.refutations.at("random_common_cause").new_estimate - r.ate) < 0.01);
    CHECK(std::fabs(r.refutations.at("placebo").new_estimate) < 0.02);
    CHECK(std::fabs(r.refutations.at("subset").new_estimate - r.ate) < r.se);
    CHECK_FALSE(r.refutations.at("unobserved_confounder").passed.has_value());
    CHECK(robust(r));

    auto again = estimate_ate(f, "beam", "greedy");
    refute(f, again);
    CHECK(again.refutations.at("placebo").new_estimate == r.refutations.at("placebo").new_estimate);

    auto noise = scm(17, 0.0);
    for (auto& row : noise.rows) row.features = {0.0, row.features[1]};
    auto n = estimate_ate(noise, "beam", "greedy");
    refute(noise, n);
    CHECK(std::fabs(n.refutations.at("placebo").new_estimate) < 0.05);

    auto hidden = scm(18, 0.3, 2000, true);
    auto h = estimate_ate(hidden, "beam", "greedy");
    refute(hidden, h);
    CHECK(std::fabs(h.refutations.at("unobserved_confounder").new_estimate - h.ate) > 2 * h.se);
}

TEST_CASE("report and csv") {
    auto f = scm(19, 0.3, 600);
    auto extra = scm(20, 0.1, 300);
    for (auto& r : extra.rows) {
        if (r.level == "beam") {
            r.level = "contrastive";
            f.rows.push_back(r);
        }
    }
    std::vector<std::string> warnings;
    auto rows = causal_report(f, {}, &warnings);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].control_level == "greedy");
    CHECK(rows[0].treatment == "T1");
    auto csv = causal_csv(rows);
    CHECK(csv.rfind("rule_id,treatment,level,control,n_treated,n_control,rho,ate,se,significance,", 0) == 0);

    auto text = frame_csv(f);
    auto back = parse_frame_csv(text);
    CHECK(back.feature_names == f.feature_names);
    REQUIRE(back.rows.size() == f.rows.size());
    CHECK(back.rows[3].y1 == f.rows[3].y1);
    CHECK(back.rows[3].features == f.rows[3].features);
    CHECK(frame_csv(back) == text);

    ExperimentFrame t2 = f;
    for (auto& r : t2.rows) r.treatment = "T2";
    warnings.clear();
    CHECK(causal_report(t2, {}, &warnings).empty());
    CHECK_FALSE(warnings.empty());
    ReportOptions with_control;
    with_control.controls["T2"] = "greedy";
    CHECK(causal_report(t2, with_control).size() == 2);
}
