#include <doctest.h>

#include <cmath>
#include <random>

#include "psc/errors.hpp"
#include "psc/score/psc.hpp"
#include "psc/util/random.hpp"

using namespace psc;

namespace {

TokenTrace probs_trace(const std::vector<double>& probs, const std::string& id = "s") {
    TokenTrace t;
    t.sample_id = id;
    for (double p : probs) {
        t.tokens.push_back({"x", t.source.size(), t.source.size() + 1, std::log(p)});
        t.source += "x";
    }
    return t;
}

TokenSpan whole(const TokenTrace& t) { return {0, t.size() - 1}; }

}  // namespace

TEST_CASE("mean") {
    auto a = probs_trace({0.5, 0.7, 0.9});
    CHECK(psc_mean(a, whole(a)) == doctest::Approx(0.7).epsilon(1e-14));
    auto b = probs_trace({0.42});
    CHECK(psc_mean(b, whole(b)) == doctest::Approx(0.42).epsilon(1e-14));
    auto c = probs_trace({0.1, 0.1, 1.0});
    CHECK(psc_mean(c, whole(c)) == doctest::Approx(0.4).epsilon(1e-14));
}

TEST_CASE("median") {
    auto a = probs_trace({0.1, 0.9, 0.8});
    CHECK(psc_median(a, whole(a)) == doctest::Approx(0.8).epsilon(1e-14));
    auto b = probs_trace({0.2, 0.4});
    CHECK(psc_median(b, whole(b)) == doctest::Approx(0.3).epsilon(1e-14));
    auto c = probs_trace({0.7});
    CHECK(psc_median(c, whole(c)) == doctest::Approx(0.7).epsilon(1e-14));
    CHECK_THROWS_AS(psc_median(c, {0, 1}), PreconditionError);
}

TEST_CASE("relative") {
    auto t = probs_trace({0.2, 0.6});
    ReferenceBounds at_min{{{0.2, 0.9}, {0.6, 0.7}}, std::nullopt};
    CHECK(psc_relative(t, whole(t), at_min) == 0.0);
    ReferenceBounds at_max{{{-0.3, 0.2}, {0.1, 0.6}}, std::nullopt};
    CHECK(psc_relative(t, whole(t), at_max) == doctest::Approx(1.0).epsilon(1e-8));
    ReferenceBounds flat{{{0.2, 0.2}, {0.6, 0.6}}, std::nullopt};
    CHECK(psc_relative(t, whole(t), flat) == 0.0);
    ReferenceBounds short_bounds{{{0.2, 0.2}}, std::nullopt};
    CHECK_THROWS_AS(psc_relative(t, whole(t), short_bounds), BoundsMismatchError);
    short_bounds.fallback = std::pair{0.1, 0.6};
    CHECK(psc_relative(t, whole(t), short_bounds) == doctest::Approx(0.5).epsilon(1e-8));
}

TEST_CASE("classification threshold is inclusive") {
    CHECK(classify(0.5));
    CHECK_FALSE(classify(0.49));
    CHECK(classify(1.0));
    CHECK_FALSE(classify(0.7, 0.8));
}

TEST_CASE("span properties on random traces") {
    std::mt19937_64 rng(util::derive_seed(9, "score"));
    for (int round = 0; round < 500; ++round) {
        std::vector<double> p;
        for (std::size_t n = 1 + util::uniform_below(rng, 40); n > 0; --n) p.push_back(0.001 + 0.999 * util::uniform01(rng));
        auto t = probs_trace(p);
        auto s = whole(t);
        double mean = psc_mean(t, s), median = psc_median(t, s);
        auto [lo, hi] = std::minmax_element(p.begin(), p.end());
        CHECK(mean >= *lo - 1e-15);
        CHECK(mean <= *hi + 1e-15);
        auto sorted = p;
        std::sort(sorted.begin(), sorted.end());
        bool member = false;
        for (std::size_t i = 0; i < sorted.size(); ++i) {
            member = member || std::fabs(sorted[i] - median) < 1e-15 ||
                     (i + 1 < sorted.size() && std::fabs((sorted[i] + sorted[i + 1]) / 2 - median) < 1e-15);
        }
        CHECK(member);

        // joint affine rescaling of P and its bounds
        ReferenceBounds b;
        b.epsilon = 0;
        for (double x : p) b.positions.push_back({x * util::uniform01(rng), x + (1 - x) * util::uniform01(rng) + 1e-6});
        double base = psc_relative(t, s, b);
        double scale = 0.05 + 0.9 * util::uniform01(rng), shift = 0.01 * util::uniform01(rng);
        std::vector<double> q;
        ReferenceBounds bs = b;
        for (std::size_t k = 0; k < p.size(); ++k) {
            q.push_back(scale * p[k] + shift);
            bs.positions[k] = {scale * b.positions[k].first + shift, scale * b.positions[k].second + shift};
        }
        auto tq = probs_trace(q);
        CHECK(psc_relative(tq, s, bs) == doctest::Approx(base).epsilon(1e-9));

        auto flat = probs_trace(std::vector<double>(p.size(), p[0]));
        CHECK(psc_mean(flat, s) == doctest::Approx(p[0]).epsilon(1e-14));
        CHECK(psc_median(flat, s) == doctest::Approx(p[0]).epsilon(1e-14));
    }
}

TEST_CASE("batch scoring uses per-rule bounds and the selected aggregate") {
    auto a = probs_trace({0.2, 0.4, 0.9}, "a");
    auto b = probs_trace({0.6, 0.8}, "b");
    auto c = probs_trace({0.3}, "c");
    SmellDiagnostic da, db, dc;
    da.rule_id = db.rule_id = "W0611";
    dc.rule_id = "C0303";
    std::vector<AlignedSmell> batch{{&a, da, {0, 2}}, {&b, db, {0, 1}}, {&c, dc, {0, 0}}};

    auto bounds = build_bounds(batch, BoundsScope::per_smell_type_batch);
    REQUIRE(bounds.size() == 2);
    const auto& w = bounds.at("W0611");
    REQUIRE(w.positions.size() == 2);
    CHECK(w.positions[0].first == doctest::Approx(0.2));
    CHECK(w.positions[0].second == doctest::Approx(0.6));
    REQUIRE(w.fallback);
    CHECK(w.fallback->first == doctest::Approx(0.2));
    CHECK(w.fallback->second == doctest::Approx(0.9));
    CHECK(build_bounds(batch, BoundsScope::global_batch).count("*") == 1);

    ScoreOptions options;
    auto scores = score_batch(batch, options);
    REQUIRE(scores.size() == 3);
    CHECK(scores[0].psc_median == doctest::Approx(0.4));
    CHECK_FALSE(scores[0].propense);
    CHECK(scores[1].propense);
    CHECK(scores[1].psc_relative == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(scores[2].psc_relative == 0.0);
    options.selected = Aggregate::relative;
    CHECK(score_batch(batch, options)[1].propense);
}

TEST_CASE("scores csv round-trip") {
    std::vector<SmellSpanScore> s(2);
    s[0] = {"a,1", "W0611", {0, 3}, 0.1, 0.2, 1.0 / 3, true};
    s[1] = {"b", "C0303", {2, 2}, 1e-300, 0.5, 0, false};
    auto text = scores_csv(s);
    CHECK(text.rfind("sample_id,rule_id,span_i,span_j,psc_mean,psc_median,psc_relative,propense\n", 0) == 0);
    auto back = parse_scores_csv(text);
    REQUIRE(back.size() == 2);
    CHECK(back[0].sample_id == "a,1");
    CHECK(back[0].psc_relative == s[0].psc_relative);
    CHECK(back[1].psc_mean == 1e-300);
    CHECK(back[0].span == s[0].span);
    CHECK_THROWS_AS(parse_scores_csv("sample_id,rule_id\na,b\n"), SchemaError);
}
