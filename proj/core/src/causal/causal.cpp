#include "psc/causal/causal.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "psc/errors.hpp"
#include "psc/stats/distributions.hpp"
#include "psc/util/csv.hpp"
#include "psc/util/random.hpp"

namespace psc::causal {

namespace {

const std::vector<std::string> kFixedColumns = {"sample_id", "rule_id", "treatment", "level", "y1", "y0"};

std::vector<double> ranks(const std::vector<double>& v) {
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> r(v.size());
    std::size_t i = 0;
    while (i < idx.size()) {
        std::size_t j = i;
        while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
        double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k) r[idx[k]] = avg;
        i = j + 1;
    }
    return r;
}

}  // namespace

std::string frame_csv(const ExperimentFrame& frame) {
    std::vector<std::string> header = kFixedColumns;
    header.insert(header.end(), frame.feature_names.begin(), frame.feature_names.end());
    std::string out = util::csv_row(header);
    for (const auto& r : frame.rows) {
        std::vector<std::string> f = {r.sample_id, r.rule_id, r.treatment, r.level, util::format_double(r.y1),
                                      util::format_double(r.y0)};
        for (double v : r.features) f.push_back(util::format_double(v));
        out += util::csv_row(f);
    }
    return out;
}

ExperimentFrame parse_frame_csv(const std::string& text) {
    auto t = util::parse_csv(text);
    std::vector<std::size_t> fixed;
    for (const auto& c : kFixedColumns) fixed.push_back(t.column(c));
    ExperimentFrame frame;
    std::vector<std::size_t> feature_cols;
    for (std::size_t c = 0; c < t.header.size(); ++c) {
        if (std::find(fixed.begin(), fixed.end(), c) != fixed.end()) continue;
        frame.feature_names.push_back(t.header[c]);
        feature_cols.push_back(c);
    }
    for (const auto& row : t.rows) {
        FrameRow r;
        r.sample_id = row[fixed[0]];
        r.rule_id = row[fixed[1]];
        r.treatment = row[fixed[2]];
        r.level = row[fixed[3]];
        r.y1 = util::parse_double(row[fixed[4]], "y1");
        r.y0 = util::parse_double(row[fixed[5]], "y0");
        for (auto c : feature_cols) r.features.push_back(util::parse_double(row[c], t.header[c]));
        frame.rows.push_back(std::move(r));
    }
    return frame;
}

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw PreconditionError("spearman inputs differ in length");
    if (x.size() < 2) return 0.0;
    auto rx = ranks(x);
    auto ry = ranks(y);
    double n = static_cast<double>(x.size());
    double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
    double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
    double sxy = 0;
    double sxx = 0;
    double syy = 0;
    for (std::size_t i = 0; i < rx.size(); ++i) {
        sxy += (rx[i] - mx) * (ry[i] - my);
        sxx += (rx[i] - mx) * (rx[i] - mx);
        syy += (ry[i] - my) * (ry[i] - my);
    }
    if (sxx == 0 || syy == 0) return 0.0;
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

Regression regress_treatment(const std::vector<double>& y, const std::vector<double>& t,
                             const std::vector<std::vector<double>>& z) {
    const std::size_t n = y.size();
    if (t.size() != n) throw PreconditionError("outcome and treatment differ in length");
    // Standardize confounders; constant columns carry no information.
    std::vector<std::vector<double>> cols;
    std::size_t width = z.empty() ? 0 : z.front().size();
    for (std::size_t c = 0; c < width; ++c) {
        double mean = 0;
        for (std::size_t i = 0; i < n; ++i) mean += z[i][c];
        mean /= static_cast<double>(n);
        double var = 0;
        for (std::size_t i = 0; i < n; ++i) var += (z[i][c] - mean) * (z[i][c] - mean);
        var /= static_cast<double>(n);
        if (!(var > 0)) continue;
        double sd = std::sqrt(var);
        std::vector<double> col(n);
        for (std::size_t i = 0; i < n; ++i) col[i] = (z[i][c] - mean) / sd;
        cols.push_back(std::move(col));
    }
    const std::size_t p = 2 + cols.size();
    if (n <= p) throw InsufficientDataError("more regressors than observations");
    Eigen::MatrixXd X(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
    Eigen::VectorXd Y(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        auto r = static_cast<Eigen::Index>(i);
        X(r, 0) = 1.0;
        X(r, 1) = t[i];
        for (std::size_t c = 0; c < cols.size(); ++c) X(r, static_cast<Eigen::Index>(c + 2)) = cols[c][i];
        Y(r) = y[i];
    }
    Eigen::MatrixXd xtx = X.transpose() * X;
    Eigen::VectorXd xty = X.transpose() * Y;
    Regression out;
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(xtx);
    qr.setThreshold(1e-10);
    if (qr.rank() < static_cast<Eigen::Index>(p)) {
        out.ridge = true;
        double lambda = 1e-6 * xtx.trace() / static_cast<double>(p);
        xtx.diagonal().array() += lambda;
        qr.compute(xtx);
    }
    Eigen::MatrixXd inv = qr.inverse();
    Eigen::VectorXd beta = inv * xty;
    Eigen::VectorXd resid = Y - X * beta;
    Eigen::MatrixXd meat = X.transpose() * resid.array().square().matrix().asDiagonal() * X;
    Eigen::MatrixXd cov = inv * meat * inv * (static_cast<double>(n) / static_cast<double>(n - p));
    out.coef = beta(1);
    out.se = std::sqrt(std::max(0.0, cov(1, 1)));
    if (!std::isfinite(out.coef)) throw SingularError("regression failed even with a ridge penalty");
    return out;
}

namespace {

struct Design {
    std::vector<double> y;
    std::vector<double> t;
    std::vector<std::vector<double>> z;
};

Design design_for(const ExperimentFrame& frame, const CausalResult& key, Outcome outcome) {
    Design d;
    for (const auto& r : frame.rows) {
        if (r.rule_id != key.rule_id || r.treatment != key.treatment) continue;
        bool treated = r.level == key.treatment_level;
        if (!treated && r.level != key.control_level) continue;
        if (r.features.size() != frame.feature_names.size()) throw SchemaError("frame row width mismatch");
        d.y.push_back(outcome == Outcome::y1 ? r.y1 : r.y0);
        d.t.push_back(treated ? 1.0 : 0.0);
        d.z.push_back(r.features);
    }
    return d;
}

bool single_family(const ExperimentFrame& frame, std::string& rule, std::string& family) {
    std::set<std::pair<std::string, std::string>> keys;
    for (const auto& r : frame.rows) keys.insert({r.rule_id, r.treatment});
    if (keys.size() != 1) return false;
    rule = keys.begin()->first;
    family = keys.begin()->second;
    return true;
}

}  // namespace

CausalResult estimate_ate(const ExperimentFrame& frame, const std::string& treatment_level,
                          const std::string& control_level, const EstimateOptions& options) {
    if (treatment_level == control_level) throw PreconditionError("treatment and control levels coincide");
    CausalResult res;
    res.treatment_level = treatment_level;
    res.control_level = control_level;
    if (!single_family(frame, res.rule_id, res.treatment)) {
        // Mixed frames: estimate over every row carrying either level.
        ExperimentFrame sub;
        sub.feature_names = frame.feature_names;
        for (auto r : frame.rows) {
            if (r.level != treatment_level && r.level != control_level) continue;
            r.rule_id = "*";
            r.treatment = "*";
            sub.rows.push_back(std::move(r));
        }
        auto out = estimate_ate(sub, treatment_level, control_level, options);
        out.rule_id = "*";
        return out;
    }
    Design d = design_for(frame, res, options.outcome);
    res.n_treated = static_cast<std::size_t>(std::count(d.t.begin(), d.t.end(), 1.0));
    res.n_control = d.t.size() - res.n_treated;
    if (res.n_treated < options.min_rows || res.n_control < options.min_rows) {
        throw InsufficientDataError("levels " + treatment_level + "/" + control_level + " have " +
                                    std::to_string(res.n_treated) + "/" + std::to_string(res.n_control) +
                                    " rows, need " + std::to_string(options.min_rows));
    }
    auto reg = regress_treatment(d.y, d.t, d.z);
    res.ate = reg.coef;
    res.se = reg.se;
    res.ridge = reg.ridge;
    res.rho = spearman(d.t, d.y);
    return res;
}

void refute(const ExperimentFrame& frame, CausalResult& result, const EstimateOptions& estimate,
            const RefuteOptions& options) {
    CausalResult key = result;
    ExperimentFrame sub;
    if (result.rule_id == "*") {
        sub.feature_names = frame.feature_names;
        for (auto r : frame.rows) {
            r.rule_id = "*";
            r.treatment = "*";
            sub.rows.push_back(std::move(r));
        }
        key.treatment = "*";
    }
    const ExperimentFrame& f = result.rule_id == "*" ? sub : frame;
    Design d = design_for(f, key, estimate.outcome);
    const std::size_t n = d.y.size();
    const std::string task = result.rule_id + "|" + result.treatment + "|" + result.treatment_level;

    {
        std::mt19937_64 rng(util::derive_seed(options.seed, "random_common_cause|" + task));
        auto z = d.z;
        for (auto& row : z) row.push_back(util::standard_normal(rng));
        double est = regress_treatment(d.y, d.t, z).coef;
        result.refutations["random_common_cause"] = {est, std::fabs(est - result.ate) < 0.1 * std::fabs(result.ate) + 0.01};
    }
    {
        std::mt19937_64 rng(util::derive_seed(options.seed, "placebo|" + task));
        auto t = d.t;
        util::shuffle(t, rng);
        auto reg = regress_treatment(d.y, t, d.z);
        result.refutations["placebo"] = {reg.coef, std::fabs(reg.coef) < std::max(0.02, 2 * reg.se)};
    }
    {
        std::mt19937_64 rng(util::derive_seed(options.seed, "unobserved_confounder|" + task));
        auto standardize = [n](const std::vector<double>& v) {
            double m = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(n);
            double s = 0;
            for (double x : v) s += (x - m) * (x - m);
            s = std::sqrt(s / static_cast<double>(n));
            std::vector<double> out(v.size());
            for (std::size_t i = 0; i < v.size(); ++i) out[i] = s > 0 ? (v[i] - m) / s : 0.0;
            return out;
        };
        auto ts = standardize(d.t);
        auto ys = standardize(d.y);
        double k = options.kappa;
        double noise = std::sqrt(std::max(0.0, 1.0 - 2.0 * k * k));
        auto z = d.z;
        for (std::size_t i = 0; i < n; ++i) z[i].push_back(k * ts[i] + k * ys[i] + noise * util::standard_normal(rng));
        result.refutations["unobserved_confounder"] = {regress_treatment(d.y, d.t, z).coef, std::nullopt};
    }
    {
        std::mt19937_64 rng(util::derive_seed(options.seed, "subset|" + task));
        auto m = static_cast<std::size_t>(std::floor(options.subset_fraction * static_cast<double>(n)));
        double total = 0;
        int done = 0;
        std::vector<std::size_t> idx(n);
        for (int s = 0; s < options.subsets; ++s) {
            std::iota(idx.begin(), idx.end(), 0);
            util::shuffle(idx, rng);
            Design part;
            for (std::size_t i = 0; i < m; ++i) {
                part.y.push_back(d.y[idx[i]]);
                part.t.push_back(d.t[idx[i]]);
                part.z.push_back(d.z[idx[i]]);
            }
            // A subset may lose one level entirely; it then carries no estimate.
            if (std::count(part.t.begin(), part.t.end(), 1.0) == 0 ||
                std::count(part.t.begin(), part.t.end(), 0.0) == 0) {
                continue;
            }
            try {
                total += regress_treatment(part.y, part.t, part.z).coef;
                ++done;
            } catch (const InsufficientDataError&) {
            }
        }
        double mean = done ? total / done : std::nan("");
        result.refutations["subset"] = {mean, done > 0 && std::fabs(mean - result.ate) <= 2 * result.se};
    }
}

std::map<std::string, std::string> default_controls() {
    return {{"T1", "greedy"}, {"T3", "M1"}, {"T4", "p0_minimal"}};
}

std::vector<CausalResult> causal_report(const ExperimentFrame& frame, const ReportOptions& options,
                                        std::vector<std::string>* warnings) {
    std::map<std::pair<std::string, std::string>, std::set<std::string>> groups;
    for (const auto& r : frame.rows) groups[{r.rule_id, r.treatment}].insert(r.level);
    std::vector<CausalResult> out;
    for (const auto& [key, levels] : groups) {
        auto [rule, family] = key;
        auto c = options.controls.find(family);
        if (c == options.controls.end()) {
            if (warnings) warnings->push_back(rule + "/" + family + ": no control level configured, skipped");
            continue;
        }
        if (!levels.count(c->second)) {
            if (warnings) warnings->push_back(rule + "/" + family + ": control level " + c->second + " absent");
            continue;
        }
        ExperimentFrame sub;
        sub.feature_names = frame.feature_names;
        for (const auto& r : frame.rows) {
            if (r.rule_id == rule && r.treatment == family) sub.rows.push_back(r);
        }
        for (const auto& level : levels) {
            if (level == c->second) continue;
            try {
                auto res = estimate_ate(sub, level, c->second, options.estimate);
                refute(sub, res, options.estimate, options.refute);
                out.push_back(std::move(res));
            } catch (const InsufficientDataError& e) {
                if (warnings) warnings->push_back(rule + "/" + family + "/" + level + ": " + e.what());
            }
        }
    }
    return out;
}

bool robust(const CausalResult& r) {
    if (r.refutations.empty()) return false;
    for (const auto& [name, ref] : r.refutations) {
        if (ref.passed.has_value() && !*ref.passed) return false;
    }
    return true;
}

namespace {

std::string stars(double ate, double se) {
    if (!(se > 0)) return "";
    double p = 2.0 * (1.0 - stats::normal_cdf(std::fabs(ate / se)));
    if (p < 0.001) return "***";
    if (p < 0.01) return "**";
    if (p < 0.05) return "*";
    return "";
}

}  // namespace

std::string causal_csv(const std::vector<CausalResult>& rows) {
    const std::vector<std::string> refs = {"random_common_cause", "placebo", "unobserved_confounder", "subset"};
    std::vector<std::string> header = {"rule_id", "treatment", "level", "control", "n_treated", "n_control",
                                       "rho",     "ate",       "se",    "significance"};
    for (const auto& r : refs) {
        header.push_back(r + "_estimate");
        header.push_back(r + "_passed");
    }
    header.push_back("robust");
    std::string out = util::csv_row(header);
    for (const auto& r : rows) {
        std::vector<std::string> f = {r.rule_id,
                                      r.treatment,
                                      r.treatment_level,
                                      r.control_level,
                                      std::to_string(r.n_treated),
                                      std::to_string(r.n_control),
                                      util::format_double(r.rho),
                                      util::format_double(r.ate),
                                      util::format_double(r.se),
                                      stars(r.ate, r.se)};
        for (const auto& name : refs) {
            auto it = r.refutations.find(name);
            if (it == r.refutations.end()) {
                f.insert(f.end(), {"", ""});
                continue;
            }
            f.push_back(util::format_double(it->second.new_estimate));
            f.push_back(it->second.passed ? (*it->second.passed ? "true" : "false") : "");
        }
        f.push_back(robust(r) ? "true" : "false");
        out += util::csv_row(f);
    }
    return out;
}

}  // namespace psc::causal
