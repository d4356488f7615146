#pragma once

#include <map>
#include <string>
#include <vector>

#include "psc/align/align.hpp"
#include "psc/core/types.hpp"

namespace psc::infogain {

inline constexpr int kDefaultBins = 10;

struct SeverityCount {
    std::size_t n_s = 0;
    std::size_t n_t = 0;
    SeverityLabel label = SeverityLabel::low;
};

/// high iff n_s / n_t > 0.5.
SeverityLabel severity_of(std::size_t n_s, std::size_t n_t) noexcept;

/// Counts tokens covered by at least one span (each token once).
SeverityCount label_severity(std::size_t n_t, const std::vector<TokenSpan>& spans);

/// Aligns every diagnostic to the trace first; unalignable ones are skipped.
SeverityCount label_severity(const TokenTrace& trace, const std::vector<SmellDiagnostic>& diagnostics);

/// Shannon entropy of the label distribution, in bits.
double entropy_bits(const std::vector<SeverityLabel>& labels);

/// H(S) - H(S | X) with X discretized into `bins` equal-frequency bins by
/// rank. Tied scores share a bin, so the result only depends on score order.
/// A single-class label set has H(S) = 0 and yields 0.
double information_gain(const std::vector<SeverityLabel>& labels, const std::vector<double>& scores,
                        int bins = kDefaultBins);

/// BLEU with clipped n-gram precisions, add-one smoothing for n > 1 and the
/// standard brevity penalty. An empty candidate scores 0.
double bleu(const std::vector<std::string>& candidate, const std::vector<std::string>& reference, int max_n = 4);

struct SeverityRow {
    std::string sample_id;
    std::string rule_id;
    std::size_t n_s = 0;
    std::size_t n_t = 0;
    SeverityLabel severity = SeverityLabel::low;
    std::map<std::string, double> metrics;
};

struct SeverityDataset {
    std::vector<SeverityRow> rows;
};

/// Columns: sample_id, rule_id, n_s, n_t, severity, then one column per metric.
std::string severity_csv(const SeverityDataset& data);
SeverityDataset parse_severity_csv(const std::string& text);

/// Merges long-format metrics (sample_id, rule_id, metric_name, value).
void merge_metrics_csv(SeverityDataset& data, const std::string& text);

struct IgRow {
    std::string rule_id;
    std::string metric;
    double ig_bits = 0;
    double h_s_bits = 0;
    std::size_t n = 0;
};

/// One row per (rule, metric). Throws SchemaError when a row lacks a metric;
/// rules with fewer than two rows are omitted with a warning.
std::vector<IgRow> ig_report(const SeverityDataset& data, const std::vector<std::string>& metrics,
                             int bins = kDefaultBins, std::vector<std::string>* warnings = nullptr);

/// rule_id, metric, ig_bits, h_s_bits, n
std::string ig_csv(const std::vector<IgRow>& rows);

}  // namespace psc::infogain
