#include "psc/stats/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "psc/errors.hpp"

namespace psc::stats {

namespace {

// Modified Lentz evaluation of the continued fraction for I_x(a, b).
double beta_fraction(double x, double a, double b) {
    constexpr double tiny = 1e-300;
    constexpr double eps = 1e-16;
    double qab = a + b;
    double qap = a + 1.0;
    double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < tiny) d = tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= 100000; ++m) {
        double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < eps) return h;
    }
    return h;
}

// Stirling remainder of ln Γ(x) for x >= 10.
double stirling_tail(double x) {
    double r = 1.0 / (x * x);
    return (1.0 / 12.0 - r * (1.0 / 360.0 - r * (1.0 / 1260.0 - r * (1.0 / 1680.0 - r / 1188.0)))) / x;
}

// ln B(a, b) without the cancellation of three large lgamma values.
double log_beta(double a, double b) {
    double big = std::max(a, b);
    double small = std::min(a, b);
    if (big < 10) return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
    // ln Γ(big + small) - ln Γ(big)
    double diff = (big - 0.5) * std::log1p(small / big) + small * std::log(big + small) - small +
                  stirling_tail(big + small) - stirling_tail(big);
    if (small < 10) return std::lgamma(small) - diff;
    double lg_small = (small - 0.5) * std::log(small) - small + 0.5 * std::log(2 * std::numbers::pi) + stirling_tail(small);
    return lg_small - diff;
}

// `y` is 1 - x, passed separately when the caller knows it more precisely.
double incomplete_beta(double x, double y, double a, double b) {
    if (!(a > 0) || !(b > 0)) throw PreconditionError("incomplete beta needs positive shape parameters");
    if (std::isnan(x)) return x;
    if (x <= 0) return 0.0;
    if (x >= 1) return 1.0;
    double log_front = a * std::log(x) + b * std::log(y) - log_beta(a, b);
    double front = std::exp(log_front);
    if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_fraction(x, a, b) / a;
    return 1.0 - front * beta_fraction(y, b, a) / b;
}

}  // namespace

double incomplete_beta(double x, double a, double b) { return incomplete_beta(x, 1.0 - x, a, b); }

double f_survival(double f, double d1, double d2) {
    if (!(d1 > 0) || !(d2 > 0)) throw PreconditionError("F distribution needs positive degrees of freedom");
    if (std::isnan(f)) return f;
    if (f <= 0) return 1.0;
    if (std::isinf(f)) return 0.0;
    return incomplete_beta(d2 / (d2 + d1 * f), d1 * f / (d2 + d1 * f), d2 / 2.0, d1 / 2.0);
}

double t_cdf(double t, double df) {
    if (!(df > 0)) throw PreconditionError("t distribution needs positive degrees of freedom");
    double tail = 0.5 * incomplete_beta(df / (df + t * t), t * t / (df + t * t), df / 2.0, 0.5);
    return t >= 0 ? 1.0 - tail : tail;
}

double t_quantile_two_sided(double level, double df) {
    if (!(level > 0 && level < 1)) throw PreconditionError("confidence level must be in (0, 1)");
    double target = 1.0 - (1.0 - level) / 2.0;
    double lo = 0.0;
    double hi = 1.0;
    while (t_cdf(hi, df) < target) hi *= 2.0;
    for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
        double mid = 0.5 * (lo + hi);
        if (t_cdf(mid, df) < target) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

}  // namespace psc::stats
