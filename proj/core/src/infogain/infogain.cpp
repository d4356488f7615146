#include "psc/infogain/infogain.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "psc/errors.hpp"
#include "psc/util/csv.hpp"

namespace psc::infogain {

SeverityLabel severity_of(std::size_t n_s, std::size_t n_t) noexcept {
    return 2 * n_s > n_t ? SeverityLabel::high : SeverityLabel::low;
}

SeverityCount label_severity(std::size_t n_t, const std::vector<TokenSpan>& spans) {
    std::vector<bool> covered(n_t, false);
    for (const auto& s : spans) {
        for (std::size_t k = s.i; k <= s.j && k < n_t; ++k) covered[k] = true;
    }
    SeverityCount c;
    c.n_t = n_t;
    c.n_s = static_cast<std::size_t>(std::count(covered.begin(), covered.end(), true));
    c.label = severity_of(c.n_s, c.n_t);
    return c;
}

SeverityCount label_severity(const TokenTrace& trace, const std::vector<SmellDiagnostic>& diagnostics) {
    std::vector<TokenSpan> spans;
    for (const auto& d : diagnostics) {
        try {
            spans.push_back(align(d, trace));
        } catch (const UnalignableError&) {
        }
    }
    return label_severity(trace.size(), spans);
}

namespace {

double binary_entropy(std::size_t high, std::size_t n) {
    if (n == 0 || high == 0 || high == n) return 0.0;
    double p = static_cast<double>(high) / static_cast<double>(n);
    return -(p * std::log2(p) + (1 - p) * std::log2(1 - p));
}

}  // namespace

double entropy_bits(const std::vector<SeverityLabel>& labels) {
    auto high = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), SeverityLabel::high));
    return binary_entropy(high, labels.size());
}

double information_gain(const std::vector<SeverityLabel>& labels, const std::vector<double>& scores, int bins) {
    if (labels.size() != scores.size()) throw PreconditionError("labels and scores differ in length");
    if (labels.size() < 2) throw DegenerateError("information gain needs at least two samples");
    if (bins < 1) throw PreconditionError("bin count must be positive");
    for (double s : scores) {
        if (std::isnan(s)) throw PreconditionError("NaN score");
    }
    double h = entropy_bits(labels);
    if (h == 0) return 0.0;
    std::size_t n = labels.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
    std::vector<std::size_t> bin_n(static_cast<std::size_t>(bins), 0);
    std::vector<std::size_t> bin_high(static_cast<std::size_t>(bins), 0);
    std::size_t current = 0;
    for (std::size_t r = 0; r < n; ++r) {
        std::size_t idx = order[r];
        // A tie group stays in the bin of its first member.
        if (r == 0 || scores[idx] != scores[order[r - 1]]) current = r * static_cast<std::size_t>(bins) / n;
        ++bin_n[current];
        if (labels[idx] == SeverityLabel::high) ++bin_high[current];
    }
    double cond = 0;
    for (std::size_t b = 0; b < bin_n.size(); ++b) {
        if (bin_n[b] == 0) continue;
        cond += static_cast<double>(bin_n[b]) / static_cast<double>(n) * binary_entropy(bin_high[b], bin_n[b]);
    }
    return std::clamp(h - cond, 0.0, h);
}

double bleu(const std::vector<std::string>& candidate, const std::vector<std::string>& reference, int max_n) {
    if (reference.empty()) throw PreconditionError("BLEU needs a non-empty reference");
    if (max_n < 1) throw PreconditionError("max_n must be positive");
    if (candidate.empty()) return 0.0;
    double log_sum = 0;
    for (int n = 1; n <= max_n; ++n) {
        std::map<std::vector<std::string>, int> ref_counts;
        for (std::size_t i = 0; i + static_cast<std::size_t>(n) <= reference.size(); ++i) {
            ++ref_counts[std::vector<std::string>(reference.begin() + static_cast<long>(i),
                                                  reference.begin() + static_cast<long>(i) + n)];
        }
        std::map<std::vector<std::string>, int> cand_counts;
        std::size_t total = 0;
        for (std::size_t i = 0; i + static_cast<std::size_t>(n) <= candidate.size(); ++i, ++total) {
            ++cand_counts[std::vector<std::string>(candidate.begin() + static_cast<long>(i),
                                                   candidate.begin() + static_cast<long>(i) + n)];
        }
        std::size_t matched = 0;
        for (const auto& [gram, c] : cand_counts) {
            auto it = ref_counts.find(gram);
            if (it != ref_counts.end()) matched += static_cast<std::size_t>(std::min(c, it->second));
        }
        double p = n == 1 ? static_cast<double>(matched) / static_cast<double>(total)
                          : (static_cast<double>(matched) + 1.0) / (static_cast<double>(total) + 1.0);
        if (p == 0) return 0.0;
        log_sum += std::log(p);
    }
    double c = static_cast<double>(candidate.size());
    double r = static_cast<double>(reference.size());
    double bp = c > r ? 1.0 : std::exp(1.0 - r / c);
    return bp * std::exp(log_sum / max_n);
}

// -- dataset io --------------------------------------------------------------

std::string severity_csv(const SeverityDataset& data) {
    std::set<std::string> names;
    for (const auto& r : data.rows) {
        for (const auto& [k, v] : r.metrics) names.insert(k);
    }
    std::vector<std::string> header = {"sample_id", "rule_id", "n_s", "n_t", "severity"};
    header.insert(header.end(), names.begin(), names.end());
    std::string out = util::csv_row(header);
    for (const auto& r : data.rows) {
        std::vector<std::string> f = {r.sample_id, r.rule_id, std::to_string(r.n_s), std::to_string(r.n_t),
                                      std::string(to_string(r.severity))};
        for (const auto& name : names) {
            auto it = r.metrics.find(name);
            f.push_back(it == r.metrics.end() ? "" : util::format_double(it->second));
        }
        out += util::csv_row(f);
    }
    return out;
}

SeverityDataset parse_severity_csv(const std::string& text) {
    auto t = util::parse_csv(text);
    std::size_t sid = t.column("sample_id");
    std::size_t rid = t.column("rule_id");
    std::size_t ns = t.column("n_s");
    std::size_t nt = t.column("n_t");
    std::size_t sev = t.column("severity");
    SeverityDataset data;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const auto& row = t.rows[r];
        SeverityRow out;
        out.sample_id = row[sid];
        out.rule_id = row[rid];
        out.n_s = static_cast<std::size_t>(util::parse_int(row[ns], "n_s"));
        out.n_t = static_cast<std::size_t>(util::parse_int(row[nt], "n_t"));
        if (row[sev] != "high" && row[sev] != "low") {
            throw SchemaError("line " + std::to_string(r + 2) + ": severity must be high or low");
        }
        out.severity = row[sev] == "high" ? SeverityLabel::high : SeverityLabel::low;
        if (out.severity != severity_of(out.n_s, out.n_t)) {
            throw SchemaError("line " + std::to_string(r + 2) + ": severity disagrees with n_s/n_t");
        }
        for (std::size_t c = 0; c < t.header.size(); ++c) {
            if (c == sid || c == rid || c == ns || c == nt || c == sev || row[c].empty()) continue;
            out.metrics[t.header[c]] = util::parse_double(row[c], t.header[c]);
        }
        data.rows.push_back(std::move(out));
    }
    return data;
}

void merge_metrics_csv(SeverityDataset& data, const std::string& text) {
    auto t = util::parse_csv(text);
    std::size_t sid = t.column("sample_id");
    std::size_t rid = t.column("rule_id");
    std::size_t name = t.column("metric_name");
    std::size_t val = t.column("value");
    std::map<std::pair<std::string, std::string>, std::vector<SeverityRow*>> index;
    for (auto& r : data.rows) index[{r.sample_id, r.rule_id}].push_back(&r);
    for (const auto& row : t.rows) {
        auto it = index.find({row[sid], row[rid]});
        if (it == index.end()) continue;
        double v = util::parse_double(row[val], "value");
        for (auto* r : it->second) r->metrics[row[name]] = v;
    }
}

std::vector<IgRow> ig_report(const SeverityDataset& data, const std::vector<std::string>& metrics, int bins,
                             std::vector<std::string>* warnings) {
    std::map<std::string, std::vector<const SeverityRow*>> by_rule;
    for (const auto& r : data.rows) by_rule[r.rule_id].push_back(&r);
    std::vector<IgRow> out;
    for (const auto& [rule, rows] : by_rule) {
        if (rows.size() < 2) {
            if (warnings) warnings->push_back(rule + ": fewer than two rows, omitted");
            continue;
        }
        std::vector<SeverityLabel> labels;
        for (const auto* r : rows) labels.push_back(r->severity);
        double h = entropy_bits(labels);
        for (const auto& m : metrics) {
            std::vector<double> scores;
            for (const auto* r : rows) {
                auto it = r->metrics.find(m);
                if (it == r->metrics.end()) {
                    throw SchemaError("metric '" + m + "' missing for " + r->sample_id + "/" + rule);
                }
                scores.push_back(it->second);
            }
            out.push_back({rule, m, information_gain(labels, scores, bins), h, rows.size()});
        }
    }
    return out;
}

std::string ig_csv(const std::vector<IgRow>& rows) {
    std::string out = util::csv_row({"rule_id", "metric", "ig_bits", "h_s_bits", "n"});
    for (const auto& r : rows) {
        out += util::csv_row({r.rule_id, r.metric, util::format_double(r.ig_bits), util::format_double(r.h_s_bits),
                              std::to_string(r.n)});
    }
    return out;
}

}  // namespace psc::infogain
