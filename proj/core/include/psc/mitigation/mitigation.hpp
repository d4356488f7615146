#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "psc/inference/client.hpp"
#include "psc/inference/decoding.hpp"
#include "psc/score/psc.hpp"

namespace psc::mitigation {

enum class PromptId { p0_minimal, p1_generic, p2_role, p3_structured };

std::string_view to_string(PromptId id) noexcept;
std::optional<PromptId> parse_prompt_id(std::string_view name) noexcept;

inline constexpr std::string_view kSnippetSlot = "{snippet}";
inline constexpr std::string_view kAvoidSlot = "{avoid_list}";

struct PromptTemplate {
    PromptId id = PromptId::p0_minimal;
    std::string text;                      // exactly one {snippet}; p3 may hold {avoid_list}
    std::vector<std::string> avoid_list;   // rule ids, p3 only

    /// The bundled wording; p3 avoids W0719, C0304 and W0611 unless given a list.
    static PromptTemplate builtin(PromptId id, std::optional<std::vector<std::string>> avoid = std::nullopt);

    /// Throws ConfigError unless the text holds exactly one {snippet}.
    void validate() const;
};

/// Substitutes the snippet and, for p3, a "- RULE symbol" line per avoided rule.
/// Throws PreconditionError on an empty snippet.
std::string render(const PromptTemplate& t, std::string_view snippet);

struct MitigationSample {
    std::string sample_id;
    std::string rule_id;
    std::string source;
};

enum class Condition { baseline, treatment };
std::string_view to_string(Condition c) noexcept;

struct PairedRow {
    std::string sample_id;
    std::string rule_id;
    Condition condition = Condition::baseline;
    double psc_median = 0;
    bool propense = false;
};

struct IncompleteRow {
    std::string sample_id;
    std::string rule_id;
    std::string reason;
};

struct MitigationOptions {
    PromptTemplate baseline = PromptTemplate::builtin(PromptId::p0_minimal);
    PromptTemplate treatment = PromptTemplate::builtin(PromptId::p3_structured);
    inference::DecodingConfig decoding;
    double cut_fraction = 0.5;
    double lambda = kDefaultLambda;
    int max_concurrent = 1;
};

struct MitigationResult {
    std::vector<PairedRow> rows;  // two rows per complete sample, baseline first
    std::vector<IncompleteRow> incomplete;
};

/// For every sample, completes its prefix under both prompts (baseline then
/// treatment), detects the sample's rule in the result and scores the first
/// instance inside the generated segment with psc_median. Samples missing
/// either condition are logged as incomplete instead of failing the run.
MitigationResult run_mitigation(const std::vector<MitigationSample>& corpus, const MitigationOptions& options,
                                const inference::CompletionClient& client);

/// Median, quartiles (linear interpolation) and whiskers at the most extreme
/// points within 1.5·IQR of the box.
struct BoxStats {
    std::size_t n = 0;
    double median = 0;
    double q1 = 0;
    double q3 = 0;
    double whisker_low = 0;
    double whisker_high = 0;
    std::vector<double> outliers;
};

BoxStats box_stats(std::vector<double> values);
double quantile(std::vector<double> values, double q);

struct SummaryRow {
    std::string rule_id;
    Condition condition = Condition::baseline;
    BoxStats stats;
    double fraction_below_lambda = 0;
};

std::vector<SummaryRow> summarize(const std::vector<PairedRow>& rows, double lambda = kDefaultLambda);

/// Baseline median minus treatment median per rule.
std::vector<std::pair<std::string, double>> median_gaps(const std::vector<SummaryRow>& summary);

/// sample_id, rule_id, condition, psc_median, propense
std::string paired_csv(const std::vector<PairedRow>& rows);
std::vector<PairedRow> parse_paired_csv(const std::string& text);
std::string incomplete_csv(const std::vector<IncompleteRow>& rows);
std::string summary_csv(const std::vector<SummaryRow>& rows);

/// Baseline and treatment boxes for one rule on a shared [0, 1] axis.
std::string boxplot_svg(const std::string& rule_id, const BoxStats& baseline, const BoxStats& treatment,
                        double lambda = kDefaultLambda);

}  // namespace psc::mitigation
