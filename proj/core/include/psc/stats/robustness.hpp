#pragma once

#include <optional>
#include <string>
#include <vector>

#include "psc/score/psc.hpp"

namespace psc::stats {

inline constexpr double kLogitDelta = 1e-6;

/// ln(p / (1 - p)) with p clamped into [delta, 1 - delta].
double logit(double p, double clamp_delta = kLogitDelta);

struct Interval {
    double mean = 0;
    double half_width = 0;
};

/// mean ± z·sd/√n with z = 1.96, or the t quantile when `t_based`.
/// Throws DegenerateError for n < 2.
Interval ci95(const std::vector<double>& sample, bool t_based = false);

struct AnovaResult {
    std::string rule_id;
    double f_stat = 0;
    double p_value = 1;
    double eta_squared = 0;
    Interval ci95;
    std::vector<int> group_sizes;
    std::vector<std::string> group_labels;
    double ss_between = 0;
    double ss_within = 0;
    int df_between = 0;
    int df_within = 0;
    bool robust = true;
};

/// One-way ANOVA. Identical groups give F = 0, p = 1, η² = 0 (0/0 taken as 0).
/// Throws DegenerateError with fewer than two groups or a group below two points.
AnovaResult one_way_anova(const std::vector<std::vector<double>>& groups);

/// "g01.Add2Equal" -> ("g01", "Add2Equal"); ids without a transformation suffix
/// are the "original" variant.
std::pair<std::string, std::string> split_variant(const std::string& sample_id);

struct RobustnessOptions {
    double clamp_delta = kLogitDelta;
    double alpha = 0.05;
    double min_eta_squared = 0.1;
    bool t_based_ci = false;
    bool skip_degenerate = false;  // drop rules that cannot be tested instead of throwing
};

/// Per rule: ANOVA over logit relative scores grouped by variant (original
/// first, then transformation order). The CI is over the raw relative scores.
/// A rule is non-robust when p < alpha and η² >= min_eta_squared.
std::vector<AnovaResult> robustness_report(const std::vector<SmellSpanScore>& scores,
                                           const RobustnessOptions& options = {},
                                           std::vector<std::string>* warnings = nullptr);

/// rule_id, F, p, eta2, ci_mean, ci_half_width, robust_flag, groups
std::string anova_csv(const std::vector<AnovaResult>& rows);

}  // namespace psc::stats
