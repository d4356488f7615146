#include <doctest.h>

#include <cmath>

#include "psc/errors.hpp"
#include "psc/stats/robustness.hpp"

using namespace psc;
using namespace psc::stats;

namespace {

SmellSpanScore score(const std::string& id, const std::string& rule, double rel) {
    SmellSpanScore s;
    s.sample_id = id;
    s.rule_id = rule;
    s.psc_relative = rel;
    return s;
}

}  // namespace

TEST_CASE("logit clamps") {
    CHECK(logit(0.5) == 0.0);
    CHECK(logit(0) == doctest::Approx(std::log(1e-6 / (1 - 1e-6))));
    CHECK(logit(1) == doctest::Approx(-logit(0)));
    CHECK(logit(0.2, 0.3) == doctest::Approx(std::log(0.3 / 0.7)));
}

TEST_CASE("confidence interval") {
    auto ci = ci95({1, 2, 3, 4});
    CHECK(ci.mean == 2.5);
    CHECK(ci.half_width == doctest::Approx(1.96 * std::sqrt(5.0 / 3 / 4)));
    CHECK(ci95({1, 2, 3, 4}, true).half_width == doctest::Approx(3.182446305284263 * std::sqrt(5.0 / 3 / 4)).epsilon(1e-9));
    CHECK_THROWS_AS(ci95({1}), DegenerateError);
}

TEST_CASE("anova basics") {
    auto r = one_way_anova({{1, 2, 3}, {4, 5, 6}});
    CHECK(r.ss_between == doctest::Approx(13.5));
    CHECK(r.ss_within == doctest::Approx(4));
    CHECK(r.df_between == 1);
    CHECK(r.df_within == 4);
    CHECK(r.f_stat == doctest::Approx(13.5));
    CHECK(r.eta_squared == doctest::Approx(13.5 / 17.5));
    auto same = one_way_anova({{0.1, 0.4}, {0.1, 0.4}, {0.4, 0.1}});
    CHECK(same.f_stat == 0.0);
    CHECK(same.p_value == 1.0);
    CHECK(same.eta_squared == 0.0);
    auto separated = one_way_anova({{1, 1}, {2, 2}});
    CHECK(std::isinf(separated.f_stat));
    CHECK(separated.p_value == 0.0);
    CHECK_THROWS_AS(one_way_anova({{1, 2}}), DegenerateError);
    CHECK_THROWS_AS(one_way_anova({{1, 2}, {3}}), DegenerateError);
}

TEST_CASE("variant ids") {
    CHECK(split_variant("g01.Add2Equal") == std::pair<std::string, std::string>{"g01", "Add2Equal"});
    CHECK(split_variant("g01") == std::pair<std::string, std::string>{"g01", "original"});
}

TEST_CASE("robustness report") {
    std::vector<SmellSpanScore> scores;
    const double vals[] = {0.2, 0.5, 0.7, 0.4};
    for (int i = 0; i < 4; ++i) {
        auto id = "s" + std::to_string(i);
        scores.push_back(score(id, "W0611", vals[i]));
        scores.push_back(score(id + ".Add2Equal", "W0611", vals[i]));
        scores.push_back(score(id + ".SwitchRelation", "W0611", vals[i]));
        scores.push_back(score(id, "C0303", 0.1 + 0.01 * i));
        scores.push_back(score(id + ".RenameVariable1", "C0303", 0.9 - 0.01 * i));
    }
    auto rows = robustness_report(scores);
    REQUIRE(rows.size() == 2);
    const auto& c = rows[0].rule_id == "C0303" ? rows[0] : rows[1];
    const auto& w = rows[0].rule_id == "W0611" ? rows[0] : rows[1];
    CHECK(w.robust);
    CHECK(w.f_stat == 0.0);
    CHECK(w.group_labels == std::vector<std::string>{"original", "Add2Equal", "SwitchRelation"});
    CHECK(w.ci95.mean == doctest::Approx(0.45));
    CHECK_FALSE(c.robust);
    CHECK(c.p_value < 0.05);

    auto csv = anova_csv(rows);
    CHECK(csv.rfind("rule_id,F,p,eta2,ci_mean,ci_half_width,robust_flag,groups\n", 0) == 0);

    std::vector<SmellSpanScore> thin{score("a", "R1705", 0.3), score("a.Add2Equal", "R1705", 0.2)};
    CHECK_THROWS_AS(robustness_report(thin), DegenerateError);
    RobustnessOptions skip;
    skip.skip_degenerate = true;
    std::vector<std::string> warnings;
    CHECK(robustness_report(thin, skip, &warnings).empty());
    CHECK(warnings.size() == 1);
}
