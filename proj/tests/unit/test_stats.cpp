#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <initializer_list>

#include "psc/stats/distributions.hpp"

using namespace psc::stats;

namespace {

struct FCase {
    double f, d1, d2, p;
};

const FCase kFCases[] = {
#include "oracles/f_survival.inc"
};

}  // namespace

TEST_CASE("F survival matches high-precision quadrature") {
    for (const auto& c : kFCases) {
        CAPTURE(c.f);
        CAPTURE(c.d1);
        CAPTURE(c.d2);
        CHECK(std::fabs(f_survival(c.f, c.d1, c.d2) - c.p) <= 1e-12 * std::max(c.p, 1e-300) + 1e-300);
    }
    CHECK(f_survival(0, 3, 7) == 1.0);
    CHECK(f_survival(INFINITY, 3, 7) == 0.0);
}

TEST_CASE("incomplete beta") {
    CHECK(incomplete_beta(0.5, 2, 3) == doctest::Approx(0.6875).epsilon(1e-14));
    CHECK(incomplete_beta(0, 2, 3) == 0.0);
    CHECK(incomplete_beta(1, 2, 3) == 1.0);
    for (double x : {0.1, 0.3, 0.77}) CHECK(incomplete_beta(x, 1.5, 4) + incomplete_beta(1 - x, 4, 1.5) == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("t and normal") {
    CHECK(t_cdf(2.0, 5) == doctest::Approx(0.9490302605850709).epsilon(1e-13));
    CHECK(t_cdf(-1.5, 2.5) == doctest::Approx(0.12391822654314802).epsilon(1e-12));
    CHECK(t_cdf(0, 7) == 0.5);
    CHECK(t_quantile_two_sided(0.95, 10) == doctest::Approx(2.2281388519649385).epsilon(1e-10));
    CHECK(t_quantile_two_sided(0.95, 3) == doctest::Approx(3.182446305284263).epsilon(1e-10));
    CHECK(normal_cdf(1.96) == doctest::Approx(0.9750021048517795).epsilon(1e-14));
    CHECK(normal_cdf(0) == 0.5);
}

TEST_CASE("F of one numerator degree is a squared t") {
    for (double t : {0.3, 1.0, 2.5, 4.0})
        for (double df : {3.0, 12.0, 60.0})
            CHECK(f_survival(t * t, 1, df) == doctest::Approx(2 * (1 - t_cdf(t, df))).epsilon(1e-11));
}
