#pragma once

namespace psc::stats {

/// Regularized incomplete beta I_x(a, b), continued-fraction evaluation.
double incomplete_beta(double x, double a, double b);

/// P(F > f) for an F(d1, d2) variable.
double f_survival(double f, double d1, double d2);

/// P(T <= t) for Student's t with `df` degrees of freedom.
double t_cdf(double t, double df);

/// Two-sided critical value: P(|T| <= q) = level.
double t_quantile_two_sided(double level, double df);

/// Standard normal CDF.
double normal_cdf(double z);

}  // namespace psc::stats
