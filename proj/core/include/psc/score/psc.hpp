#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "psc/align/align.hpp"
#include "psc/core/types.hpp"

namespace psc {

inline constexpr double kDefaultLambda = 0.5;
inline constexpr double kDefaultEpsilon = 1e-9;

double psc_mean(const TokenTrace& trace, const TokenSpan& span);
double psc_median(const TokenTrace& trace, const TokenSpan& span);

enum class BoundsScope { per_smell_type_batch, global_batch };

/// Empirical per-offset probability extremes used by the relative score.
struct ReferenceBounds {
    std::vector<std::pair<double, double>> positions;          // (p_min, p_max) by offset within span
    std::optional<std::pair<double, double>> fallback;         // used past the last offset
    double epsilon = kDefaultEpsilon;
    BoundsScope scope = BoundsScope::per_smell_type_batch;
};

/// Mean over span offsets k of (P_k - Pmin_k) / (Pmax_k - Pmin_k + epsilon).
/// Throws BoundsMismatchError when an offset has no bounds and no fallback.
double psc_relative(const TokenTrace& trace, const TokenSpan& span, const ReferenceBounds& bounds);

/// True iff score >= lambda.
bool classify(double score, double lambda = kDefaultLambda);

enum class Aggregate { mean, median, relative };

struct SmellSpanScore {
    std::string sample_id;
    std::string rule_id;
    TokenSpan span;
    double psc_mean = 0;
    double psc_median = 0;
    double psc_relative = 0;
    bool propense = false;
};

/// A diagnostic aligned to a trace, ready for batch scoring.
struct AlignedSmell {
    const TokenTrace* trace = nullptr;
    SmellDiagnostic diag;
    TokenSpan span;
};

/// Bounds keyed by rule id (or a single "*" entry for global scope).
std::map<std::string, ReferenceBounds> build_bounds(const std::vector<AlignedSmell>& batch, BoundsScope scope,
                                                    double epsilon = kDefaultEpsilon);

struct ScoreOptions {
    BoundsScope scope = BoundsScope::per_smell_type_batch;
    double epsilon = kDefaultEpsilon;
    double lambda = kDefaultLambda;
    Aggregate selected = Aggregate::median;
};

std::vector<SmellSpanScore> score_batch(const std::vector<AlignedSmell>& batch, const ScoreOptions& options = {});

std::string scores_csv(const std::vector<SmellSpanScore>& scores);
std::vector<SmellSpanScore> parse_scores_csv(const std::string& text);

}  // namespace psc
