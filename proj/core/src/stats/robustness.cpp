#include "psc/stats/robustness.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "psc/errors.hpp"
#include "psc/sect/transform.hpp"
#include "psc/stats/distributions.hpp"
#include "psc/util/csv.hpp"

namespace psc::stats {

double logit(double p, double clamp_delta) {
    if (!std::isfinite(p)) throw PreconditionError("logit of a non-finite value");
    p = std::clamp(p, clamp_delta, 1.0 - clamp_delta);
    return std::log(p / (1.0 - p));
}

namespace {

double mean_of(const std::vector<double>& xs) {
    double s = 0;
    for (double x : xs) s += x;
    double m = s / static_cast<double>(xs.size());
    // One correction pass keeps the mean exact for constant samples.
    double r = 0;
    for (double x : xs) r += x - m;
    return m + r / static_cast<double>(xs.size());
}

}  // namespace

Interval ci95(const std::vector<double>& sample, bool t_based) {
    if (sample.size() < 2) throw DegenerateError("confidence interval needs at least two points");
    double m = mean_of(sample);
    double ss = 0;
    for (double x : sample) ss += (x - m) * (x - m);
    double n = static_cast<double>(sample.size());
    double sd = std::sqrt(ss / (n - 1));
    double z = t_based ? t_quantile_two_sided(0.95, n - 1) : 1.96;
    return {m, z * sd / std::sqrt(n)};
}

AnovaResult one_way_anova(const std::vector<std::vector<double>>& groups) {
    if (groups.size() < 2) throw DegenerateError("ANOVA needs at least two groups");
    AnovaResult r;
    std::vector<double> means;
    std::vector<double> all;
    for (const auto& g : groups) {
        if (g.size() < 2) throw DegenerateError("ANOVA group with fewer than two observations");
        r.group_sizes.push_back(static_cast<int>(g.size()));
        means.push_back(mean_of(g));
        all.insert(all.end(), g.begin(), g.end());
    }
    bool equal_means = std::all_of(means.begin(), means.end(), [&](double m) { return m == means.front(); });
    double grand = equal_means ? means.front() : mean_of(all);
    for (std::size_t i = 0; i < groups.size(); ++i) {
        if (!equal_means) {
            double d = means[i] - grand;
            r.ss_between += static_cast<double>(groups[i].size()) * d * d;
        }
        for (double x : groups[i]) r.ss_within += (x - means[i]) * (x - means[i]);
    }
    r.df_between = static_cast<int>(groups.size()) - 1;
    r.df_within = static_cast<int>(all.size()) - static_cast<int>(groups.size());
    double total = r.ss_between + r.ss_within;
    r.eta_squared = total > 0 ? r.ss_between / total : 0.0;
    if (r.ss_between == 0) {
        r.f_stat = 0;
        r.p_value = 1;
    } else if (r.ss_within == 0) {
        r.f_stat = std::numeric_limits<double>::infinity();
        r.p_value = 0;
    } else {
        r.f_stat = (r.ss_between / r.df_between) / (r.ss_within / r.df_within);
        r.p_value = f_survival(r.f_stat, r.df_between, r.df_within);
    }
    return r;
}

std::pair<std::string, std::string> split_variant(const std::string& sample_id) {
    auto dot = sample_id.rfind('.');
    if (dot != std::string::npos) {
        std::string suffix = sample_id.substr(dot + 1);
        if (auto k = sect::parse_kind(suffix)) return {sample_id.substr(0, dot), std::string(sect::to_string(*k))};
    }
    return {sample_id, "original"};
}

std::vector<AnovaResult> robustness_report(const std::vector<SmellSpanScore>& scores,
                                           const RobustnessOptions& options, std::vector<std::string>* warnings) {
    std::vector<std::string> order = {"original"};
    for (auto k : sect::kAllKinds) order.emplace_back(sect::to_string(k));
    std::map<std::string, std::map<std::string, std::vector<double>>> by_rule;
    for (const auto& s : scores) by_rule[s.rule_id][split_variant(s.sample_id).second].push_back(s.psc_relative);

    std::vector<AnovaResult> out;
    for (const auto& [rule, variants] : by_rule) {
        std::vector<std::vector<double>> groups;
        std::vector<std::string> labels;
        std::vector<double> raw;
        for (const auto& name : order) {
            auto it = variants.find(name);
            if (it == variants.end()) continue;
            std::vector<double> g;
            for (double v : it->second) g.push_back(logit(v, options.clamp_delta));
            groups.push_back(std::move(g));
            labels.push_back(name);
            raw.insert(raw.end(), it->second.begin(), it->second.end());
        }
        AnovaResult r;
        try {
            r = one_way_anova(groups);
            r.ci95 = ci95(raw, options.t_based_ci);
        } catch (const DegenerateError& e) {
            if (!options.skip_degenerate) throw DegenerateError(rule + ": " + e.what());
            if (warnings) warnings->push_back(rule + ": " + e.what());
            continue;
        }
        r.rule_id = rule;
        r.group_labels = std::move(labels);
        r.robust = !(r.p_value < options.alpha && r.eta_squared >= options.min_eta_squared);
        out.push_back(std::move(r));
    }
    return out;
}

std::string anova_csv(const std::vector<AnovaResult>& rows) {
    std::string out = util::csv_row({"rule_id", "F", "p", "eta2", "ci_mean", "ci_half_width", "robust_flag", "groups"});
    for (const auto& r : rows) {
        std::string groups;
        for (std::size_t i = 0; i < r.group_sizes.size(); ++i) {
            if (i) groups += ';';
            groups += (i < r.group_labels.size() ? r.group_labels[i] : std::to_string(i)) + ":" +
                      std::to_string(r.group_sizes[i]);
        }
        out += util::csv_row({r.rule_id, util::format_double(r.f_stat), util::format_double(r.p_value),
                              util::format_double(r.eta_squared), util::format_double(r.ci95.mean),
                              util::format_double(r.ci95.half_width), r.robust ? "true" : "false", groups});
    }
    return out;
}

}  // namespace psc::stats
