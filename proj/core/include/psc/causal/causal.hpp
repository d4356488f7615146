#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace psc::causal {

/// One scored sample under one treatment level, with its confounders.
struct FrameRow {
    std::string sample_id;
    std::string rule_id;
    std::string treatment;  // family, e.g. T1
    std::string level;      // e.g. greedy, beam
    double y1 = 0;          // median PSC
    double y0 = 0;          // relative PSC
    std::vector<double> features;
};

struct ExperimentFrame {
    std::vector<std::string> feature_names;
    std::vector<FrameRow> rows;
};

/// sample_id, rule_id, treatment, level, y1, y0, then one column per feature.
std::string frame_csv(const ExperimentFrame& frame);
ExperimentFrame parse_frame_csv(const std::string& text);

enum class Outcome { y1, y0 };

struct Refutation {
    double new_estimate = 0;
    std::optional<bool> passed;  // empty for sensitivity-only checks
};

struct CausalResult {
    std::string rule_id;
    std::string treatment;
    std::string treatment_level;
    std::string control_level;
    double rho = 0;
    double ate = 0;
    double se = 0;
    std::size_t n_treated = 0;
    std::size_t n_control = 0;
    bool ridge = false;  // the design was singular and a ridge penalty was used
    std::map<std::string, Refutation> refutations;
};

/// Spearman rank correlation with average ranks for ties; 0 when either side is constant.
double spearman(const std::vector<double>& x, const std::vector<double>& y);

struct Regression {
    double coef = 0;  // coefficient of the first regressor
    double se = 0;    // HC1 robust standard error
    bool ridge = false;
};

/// Least squares of y on [1, t, standardized columns of z]; constant z
/// columns are dropped. Falls back to a small ridge penalty when singular.
Regression regress_treatment(const std::vector<double>& y, const std::vector<double>& t,
                             const std::vector<std::vector<double>>& z);

struct EstimateOptions {
    Outcome outcome = Outcome::y1;
    std::size_t min_rows = 30;  // per level
};

/// Backdoor-adjusted effect of `treatment_level` vs `control_level` over all
/// rows of the frame carrying either level. Throws InsufficientDataError when
/// a level has fewer than min_rows rows.
CausalResult estimate_ate(const ExperimentFrame& frame, const std::string& treatment_level,
                          const std::string& control_level, const EstimateOptions& options = {});

struct RefuteOptions {
    std::uint64_t seed = 0;
    double kappa = 0.3;
    int subsets = 20;
    double subset_fraction = 0.8;
};

/// Fills result.refutations with random_common_cause, placebo,
/// unobserved_confounder and subset.
void refute(const ExperimentFrame& frame, CausalResult& result, const EstimateOptions& estimate = {},
            const RefuteOptions& options = {});

/// Control level per treatment family; T2 has no fixed default.
std::map<std::string, std::string> default_controls();

struct ReportOptions {
    EstimateOptions estimate;
    RefuteOptions refute;
    std::map<std::string, std::string> controls = default_controls();
};

/// One result per (rule, treatment family, non-control level). Groups with
/// too few rows are skipped with a warning.
std::vector<CausalResult> causal_report(const ExperimentFrame& frame, const ReportOptions& options = {},
                                        std::vector<std::string>* warnings = nullptr);

/// True when every refutation that carries a pass flag passed.
bool robust(const CausalResult& r);

/// rule_id, treatment, level, control, n_treated, n_control, rho, ate, se,
/// significance, then new estimate and pass flag per refutation, robust.
std::string causal_csv(const std::vector<CausalResult>& rows);

}  // namespace psc::causal
