#include "psc/mitigation/mitigation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "psc/align/align.hpp"
#include "psc/errors.hpp"
#include "psc/smells/detect.hpp"
#include "psc/util/csv.hpp"

namespace psc::mitigation {

std::string_view to_string(PromptId id) noexcept {
    switch (id) {
        case PromptId::p0_minimal:
            return "p0_minimal";
        case PromptId::p1_generic:
            return "p1_generic";
        case PromptId::p2_role:
            return "p2_role";
        case PromptId::p3_structured:
            return "p3_structured";
    }
    return "?";
}

std::optional<PromptId> parse_prompt_id(std::string_view name) noexcept {
    for (auto id : {PromptId::p0_minimal, PromptId::p1_generic, PromptId::p2_role, PromptId::p3_structured}) {
        if (to_string(id) == name || to_string(id).substr(0, 2) == name) return id;
    }
    return std::nullopt;
}

std::string_view to_string(Condition c) noexcept { return c == Condition::baseline ? "baseline" : "treatment"; }

PromptTemplate PromptTemplate::builtin(PromptId id, std::optional<std::vector<std::string>> avoid) {
    PromptTemplate t;
    t.id = id;
    switch (id) {
        case PromptId::p0_minimal:
            t.text = "{snippet}";
            break;
        case PromptId::p1_generic:
            t.text = "Complete the following code\n{snippet}";
            break;
        case PromptId::p2_role:
            t.text =
                "You are an expert software engineer committed to producing clean, readable and maintainable "
                "Python code.\nComplete the following code\n{snippet}";
            break;
        case PromptId::p3_structured:
            t.text =
                "You are an expert software engineer committed to producing clean, readable and maintainable "
                "Python code.\nComplete the following code. Avoid these code smells:\n{avoid_list}\n{snippet}";
            t.avoid_list = avoid.value_or(std::vector<std::string>{"W0719", "C0304", "W0611"});
            break;
    }
    return t;
}

namespace {

std::size_t count_of(std::string_view text, std::string_view needle) {
    std::size_t n = 0;
    for (auto pos = text.find(needle); pos != std::string_view::npos; pos = text.find(needle, pos + 1)) ++n;
    return n;
}

}  // namespace

void PromptTemplate::validate() const {
    if (count_of(text, kSnippetSlot) != 1) throw ConfigError("prompt template must contain exactly one {snippet}");
    if (count_of(text, kAvoidSlot) > 1) throw ConfigError("prompt template holds {avoid_list} more than once");
}

std::string render(const PromptTemplate& t, std::string_view snippet) {
    if (snippet.empty()) throw PreconditionError("cannot render a prompt for an empty snippet");
    t.validate();
    std::string out = t.text;
    if (auto pos = out.find(kAvoidSlot); pos != std::string::npos) {
        std::string list;
        for (const auto& rule : t.avoid_list) {
            if (!list.empty()) list += '\n';
            list += "- " + rule;
            auto sym = smells::symbol_of(rule);
            if (!sym.empty()) list += " " + std::string(sym);
        }
        out.replace(pos, kAvoidSlot.size(), list);
    }
    out.replace(out.find(kSnippetSlot), kSnippetSlot.size(), snippet);
    return out;
}

namespace {

// Text sent before the snippet prefix; the snippet must close the prompt.
std::string header_of(const PromptTemplate& t) {
    std::string rendered = render(t, "\x01");
    auto pos = rendered.find('\x01');
    if (pos + 1 != rendered.size()) throw ConfigError("prompt template must end with {snippet} for completion");
    return rendered.substr(0, pos);
}

struct Scored {
    std::optional<double> median;
    std::string error;
};

Scored score_condition(const MitigationSample& s, const std::string& header, const MitigationOptions& o,
                       const inference::CompletionClient& client) {
    Scored out;
    try {
        auto trace = client.complete_prefix(s.source, o.cut_fraction, o.decoding, s.sample_id, header);
        auto diags = smells::detect(trace.source, smells::RuleSet::of({s.rule_id}), s.sample_id);
        for (const auto& d : diags) {
            if (d.rule_id != s.rule_id) continue;
            TokenSpan span;
            try {
                span = align(d, trace);
            } catch (const UnalignableError&) {
                continue;
            }
            if (!in_generated_segment(span, trace)) continue;
            out.median = psc_median(trace, span);
            return out;
        }
        out.error = "no " + s.rule_id + " instance in the generated segment";
    } catch (const Error& e) {
        out.error = e.what();
    }
    return out;
}

}  // namespace

MitigationResult run_mitigation(const std::vector<MitigationSample>& corpus, const MitigationOptions& options,
                                const inference::CompletionClient& client) {
    options.decoding.validate();
    const std::string base_header = header_of(options.baseline);
    const std::string treat_header = header_of(options.treatment);
    std::vector<std::pair<Scored, Scored>> results(corpus.size());
    // Pairs run sequentially inside a job so both prompts see the same endpoint state.
    inference::run_bounded(corpus.size(), options.max_concurrent, [&](std::size_t i) {
        results[i].first = score_condition(corpus[i], base_header, options, client);
        results[i].second = score_condition(corpus[i], treat_header, options, client);
        return TokenTrace{};
    });
    MitigationResult out;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        const auto& s = corpus[i];
        const auto& [b, t] = results[i];
        if (!b.median || !t.median) {
            std::string reason;
            if (!b.median) reason += "baseline: " + b.error;
            if (!t.median) reason += std::string(reason.empty() ? "" : "; ") + "treatment: " + t.error;
            out.incomplete.push_back({s.sample_id, s.rule_id, reason});
            continue;
        }
        out.rows.push_back({s.sample_id, s.rule_id, Condition::baseline, *b.median, classify(*b.median, options.lambda)});
        out.rows.push_back({s.sample_id, s.rule_id, Condition::treatment, *t.median, classify(*t.median, options.lambda)});
    }
    return out;
}

double quantile(std::vector<double> values, double q) {
    if (values.empty()) throw DegenerateError("quantile of an empty sample");
    std::sort(values.begin(), values.end());
    double h = (static_cast<double>(values.size()) - 1) * q;
    auto lo = static_cast<std::size_t>(std::floor(h));
    auto hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

BoxStats box_stats(std::vector<double> values) {
    if (values.empty()) throw DegenerateError("box statistics of an empty sample");
    std::sort(values.begin(), values.end());
    BoxStats b;
    b.n = values.size();
    b.median = quantile(values, 0.5);
    b.q1 = quantile(values, 0.25);
    b.q3 = quantile(values, 0.75);
    double iqr = b.q3 - b.q1;
    double lo_fence = b.q1 - 1.5 * iqr;
    double hi_fence = b.q3 + 1.5 * iqr;
    b.whisker_low = b.q1;
    b.whisker_high = b.q3;
    for (double v : values) {
        if (v < lo_fence || v > hi_fence) {
            b.outliers.push_back(v);
            continue;
        }
        b.whisker_low = std::min(b.whisker_low, v);
        b.whisker_high = std::max(b.whisker_high, v);
    }
    return b;
}

std::vector<SummaryRow> summarize(const std::vector<PairedRow>& rows, double lambda) {
    std::map<std::pair<std::string, Condition>, std::vector<double>> groups;
    for (const auto& r : rows) groups[{r.rule_id, r.condition}].push_back(r.psc_median);
    std::vector<SummaryRow> out;
    for (const auto& [key, values] : groups) {
        SummaryRow s;
        s.rule_id = key.first;
        s.condition = key.second;
        s.stats = box_stats(values);
        auto below = std::count_if(values.begin(), values.end(), [&](double v) { return !classify(v, lambda); });
        s.fraction_below_lambda = static_cast<double>(below) / static_cast<double>(values.size());
        out.push_back(std::move(s));
    }
    return out;
}

std::vector<std::pair<std::string, double>> median_gaps(const std::vector<SummaryRow>& summary) {
    std::map<std::string, std::pair<std::optional<double>, std::optional<double>>> m;
    for (const auto& s : summary) {
        (s.condition == Condition::baseline ? m[s.rule_id].first : m[s.rule_id].second) = s.stats.median;
    }
    std::vector<std::pair<std::string, double>> out;
    for (const auto& [rule, pair] : m) {
        if (pair.first && pair.second) out.emplace_back(rule, *pair.first - *pair.second);
    }
    return out;
}

std::string paired_csv(const std::vector<PairedRow>& rows) {
    std::string out = util::csv_row({"sample_id", "rule_id", "condition", "psc_median", "propense"});
    for (const auto& r : rows) {
        out += util::csv_row({r.sample_id, r.rule_id, std::string(to_string(r.condition)),
                              util::format_double(r.psc_median), r.propense ? "true" : "false"});
    }
    return out;
}

std::vector<PairedRow> parse_paired_csv(const std::string& text) {
    auto t = util::parse_csv(text);
    const std::vector<std::string> expected = {"sample_id", "rule_id", "condition", "psc_median", "propense"};
    if (t.header != expected) throw SchemaError("paired CSV header must be sample_id,rule_id,condition,psc_median,propense");
    std::vector<PairedRow> out;
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        const auto& row = t.rows[i];
        std::string where = "line " + std::to_string(i + 2) + ": ";
        PairedRow r;
        r.sample_id = row[0];
        r.rule_id = row[1];
        if (row[2] != "baseline" && row[2] != "treatment") throw SchemaError(where + "unknown condition " + row[2]);
        r.condition = row[2] == "baseline" ? Condition::baseline : Condition::treatment;
        r.psc_median = util::parse_double(row[3], "psc_median");
        if (!(r.psc_median >= 0 && r.psc_median <= 1)) throw SchemaError(where + "psc_median outside [0, 1]");
        if (row[4] != "true" && row[4] != "false") throw SchemaError(where + "propense must be true or false");
        r.propense = row[4] == "true";
        out.push_back(std::move(r));
    }
    return out;
}

std::string incomplete_csv(const std::vector<IncompleteRow>& rows) {
    std::string out = util::csv_row({"sample_id", "rule_id", "reason"});
    for (const auto& r : rows) out += util::csv_row({r.sample_id, r.rule_id, r.reason});
    return out;
}

std::string summary_csv(const std::vector<SummaryRow>& rows) {
    std::string out = util::csv_row({"rule_id", "condition", "n", "median", "q1", "q3", "whisker_low", "whisker_high",
                                     "fraction_below_lambda"});
    for (const auto& r : rows) {
        const auto& b = r.stats;
        out += util::csv_row({r.rule_id, std::string(to_string(r.condition)), std::to_string(b.n),
                              util::format_double(b.median), util::format_double(b.q1), util::format_double(b.q3),
                              util::format_double(b.whisker_low), util::format_double(b.whisker_high),
                              util::format_double(r.fraction_below_lambda)});
    }
    return out;
}

namespace {

std::string num(double v) {
    std::ostringstream os;
    os.setf(std::ios::fixed);
    os.precision(2);
    os << v;
    return os.str();
}

std::string xml_escape(std::string_view s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '<':
                out += "&lt;";
                break;
            case '>':
                out += "&gt;";
                break;
            case '&':
                out += "&amp;";
                break;
            case '"':
                out += "&quot;";
                break;
            default:
                out += c;
        }
    }
    return out;
}

}  // namespace

std::string boxplot_svg(const std::string& rule_id, const BoxStats& baseline, const BoxStats& treatment,
                        double lambda) {
    constexpr double width = 320;
    constexpr double height = 300;
    constexpr double top = 40;
    constexpr double bottom = 260;
    constexpr double left = 50;
    auto y = [&](double v) { return bottom - std::clamp(v, 0.0, 1.0) * (bottom - top); };
    std::ostringstream s;
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << ' ' << height << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
    s << "<title>" << xml_escape(rule_id) << "</title>\n";
    s << "<text x=\"" << width / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"13\">" << xml_escape(rule_id)
      << "</text>\n";
    s << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << bottom
      << "\" stroke=\"black\"/>\n";
    for (int k = 0; k <= 4; ++k) {
        double v = k / 4.0;
        s << "<line x1=\"" << left - 4 << "\" y1=\"" << num(y(v)) << "\" x2=\"" << left << "\" y2=\"" << num(y(v))
          << "\" stroke=\"black\"/><text x=\"" << left - 8 << "\" y=\"" << num(y(v) + 4)
          << "\" text-anchor=\"end\">" << num(v) << "</text>\n";
    }
    s << "<line class=\"lambda\" x1=\"" << left << "\" y1=\"" << num(y(lambda)) << "\" x2=\"" << width - 10
      << "\" y2=\"" << num(y(lambda)) << "\" stroke=\"gray\" stroke-dasharray=\"4 3\"/>\n";
    const std::pair<const BoxStats*, const char*> boxes[] = {{&baseline, "baseline"}, {&treatment, "treatment"}};
    for (int i = 0; i < 2; ++i) {
        const BoxStats& b = *boxes[i].first;
        double cx = left + 70 + i * 130;
        double half = 30;
        s << "<g class=\"box\" data-condition=\"" << boxes[i].second << "\" data-n=\"" << b.n << "\" data-median=\""
          << util::format_double(b.median) << "\">\n";
        s << "<line x1=\"" << cx << "\" y1=\"" << num(y(b.whisker_low)) << "\" x2=\"" << cx << "\" y2=\""
          << num(y(b.q1)) << "\" stroke=\"black\"/>\n";
        s << "<line x1=\"" << cx << "\" y1=\"" << num(y(b.q3)) << "\" x2=\"" << cx << "\" y2=\""
          << num(y(b.whisker_high)) << "\" stroke=\"black\"/>\n";
        s << "<rect x=\"" << cx - half << "\" y=\"" << num(y(b.q3)) << "\" width=\"" << 2 * half << "\" height=\""
          << num(y(b.q1) - y(b.q3)) << "\" fill=\"" << (i == 0 ? "#9ecae1" : "#fdae6b") << "\" stroke=\"black\"/>\n";
        s << "<line x1=\"" << cx - half << "\" y1=\"" << num(y(b.median)) << "\" x2=\"" << cx + half << "\" y2=\""
          << num(y(b.median)) << "\" stroke=\"black\" stroke-width=\"2\"/>\n";
        for (double o : b.outliers) {
            s << "<circle cx=\"" << cx << "\" cy=\"" << num(y(o)) << "\" r=\"2.5\" fill=\"none\" stroke=\"black\"/>\n";
        }
        s << "<text x=\"" << cx << "\" y=\"" << bottom + 18 << "\" text-anchor=\"middle\">" << boxes[i].second
          << " (n=" << b.n << ")</text>\n";
        s << "</g>\n";
    }
    s << "</svg>\n";
    return s.str();
}

}  // namespace psc::mitigation
