#include "psc/score/psc.hpp"

#include <algorithm>
#include <limits>

#include "psc/errors.hpp"
#include "psc/util/csv.hpp"

namespace psc {

namespace {

void check_span(const TokenTrace& trace, const TokenSpan& span) {
    if (span.i > span.j || span.j >= trace.tokens.size()) {
        throw PreconditionError("span (" + std::to_string(span.i) + ", " + std::to_string(span.j) +
                                ") invalid for trace of " + std::to_string(trace.tokens.size()) + " tokens");
    }
}

std::vector<double> span_probs(const TokenTrace& trace, const TokenSpan& span) {
    check_span(trace, span);
    std::vector<double> p;
    p.reserve(span.length());
    for (std::size_t k = span.i; k <= span.j; ++k) p.push_back(trace.tokens[k].prob());
    return p;
}

}  // namespace

double psc_mean(const TokenTrace& trace, const TokenSpan& span) {
    auto p = span_probs(trace, span);
    double sum = 0;
    for (double x : p) sum += x;
    return sum / static_cast<double>(p.size());
}

double psc_median(const TokenTrace& trace, const TokenSpan& span) {
    auto p = span_probs(trace, span);
    std::sort(p.begin(), p.end());
    std::size_t n = p.size();
    return n % 2 ? p[n / 2] : (p[n / 2 - 1] + p[n / 2]) / 2.0;
}

double psc_relative(const TokenTrace& trace, const TokenSpan& span, const ReferenceBounds& bounds) {
    auto p = span_probs(trace, span);
    double sum = 0;
    for (std::size_t k = 0; k < p.size(); ++k) {
        std::pair<double, double> b;
        if (k < bounds.positions.size()) {
            b = bounds.positions[k];
        } else if (bounds.fallback) {
            b = *bounds.fallback;
        } else {
            throw BoundsMismatchError("no bounds for span offset " + std::to_string(k));
        }
        sum += (p[k] - b.first) / (b.second - b.first + bounds.epsilon);
    }
    return sum / static_cast<double>(p.size());
}

bool classify(double score, double lambda) { return score >= lambda; }

std::map<std::string, ReferenceBounds> build_bounds(const std::vector<AlignedSmell>& batch, BoundsScope scope,
                                                    double epsilon) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    std::pair<double, double> global{inf, -inf};
    std::map<std::string, std::vector<const AlignedSmell*>> groups;
    for (const auto& s : batch) {
        auto probs = span_probs(*s.trace, s.span);
        for (double x : probs) {
            global.first = std::min(global.first, x);
            global.second = std::max(global.second, x);
        }
        groups[scope == BoundsScope::global_batch ? std::string("*") : s.diag.rule_id].push_back(&s);
    }
    std::map<std::string, ReferenceBounds> out;
    for (const auto& [key, members] : groups) {
        std::size_t shortest = std::numeric_limits<std::size_t>::max();
        for (const auto* m : members) shortest = std::min(shortest, m->span.length());
        ReferenceBounds rb;
        rb.epsilon = epsilon;
        rb.scope = scope;
        rb.positions.assign(shortest, {inf, -inf});
        for (const auto* m : members) {
            for (std::size_t k = 0; k < shortest; ++k) {
                double x = m->trace->tokens[m->span.i + k].prob();
                rb.positions[k].first = std::min(rb.positions[k].first, x);
                rb.positions[k].second = std::max(rb.positions[k].second, x);
            }
        }
        rb.fallback = global;
        out.emplace(key, std::move(rb));
    }
    return out;
}

std::vector<SmellSpanScore> score_batch(const std::vector<AlignedSmell>& batch, const ScoreOptions& options) {
    auto bounds = build_bounds(batch, options.scope, options.epsilon);
    std::vector<SmellSpanScore> out;
    out.reserve(batch.size());
    for (const auto& s : batch) {
        const auto& rb = bounds.at(options.scope == BoundsScope::global_batch ? std::string("*") : s.diag.rule_id);
        SmellSpanScore sc;
        sc.sample_id = s.trace->sample_id;
        sc.rule_id = s.diag.rule_id;
        sc.span = s.span;
        sc.psc_mean = psc_mean(*s.trace, s.span);
        sc.psc_median = psc_median(*s.trace, s.span);
        sc.psc_relative = psc_relative(*s.trace, s.span, rb);
        double selected = options.selected == Aggregate::mean     ? sc.psc_mean
                          : options.selected == Aggregate::median ? sc.psc_median
                                                                  : sc.psc_relative;
        sc.propense = classify(selected, options.lambda);
        out.push_back(std::move(sc));
    }
    return out;
}

std::string scores_csv(const std::vector<SmellSpanScore>& scores) {
    std::string out = util::csv_row(
        {"sample_id", "rule_id", "span_i", "span_j", "psc_mean", "psc_median", "psc_relative", "propense"});
    for (const auto& s : scores) {
        out += util::csv_row({s.sample_id, s.rule_id, std::to_string(s.span.i), std::to_string(s.span.j),
                              util::format_double(s.psc_mean), util::format_double(s.psc_median),
                              util::format_double(s.psc_relative), s.propense ? "true" : "false"});
    }
    return out;
}

std::vector<SmellSpanScore> parse_scores_csv(const std::string& text) {
    auto t = util::parse_csv(text);
    std::size_t c_id = t.column("sample_id"), c_rule = t.column("rule_id"), c_i = t.column("span_i"),
                c_j = t.column("span_j"), c_mean = t.column("psc_mean"), c_med = t.column("psc_median"),
                c_rel = t.column("psc_relative"), c_prop = t.column("propense");
    std::vector<SmellSpanScore> out;
    for (const auto& r : t.rows) {
        SmellSpanScore s;
        s.sample_id = r[c_id];
        s.rule_id = r[c_rule];
        s.span.i = static_cast<std::size_t>(util::parse_int(r[c_i], "span_i"));
        s.span.j = static_cast<std::size_t>(util::parse_int(r[c_j], "span_j"));
        s.psc_mean = util::parse_double(r[c_mean], "psc_mean");
        s.psc_median = util::parse_double(r[c_med], "psc_median");
        s.psc_relative = util::parse_double(r[c_rel], "psc_relative");
        if (r[c_prop] != "true" && r[c_prop] != "false") throw SchemaError("propense must be true or false");
        s.propense = r[c_prop] == "true";
        out.push_back(std::move(s));
    }
    return out;
}

}  // namespace psc
