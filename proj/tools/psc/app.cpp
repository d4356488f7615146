#include "app.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "psc/align/align.hpp"
#include "psc/causal/causal.hpp"
#include "psc/causal/features.hpp"
#include "psc/cli/filter.hpp"
#include "psc/core/validate.hpp"
#include "psc/errors.hpp"
#include "psc/inference/client.hpp"
#include "psc/infogain/infogain.hpp"
#include "psc/mitigation/mitigation.hpp"
#include "psc/score/psc.hpp"
#include "psc/sect/equivalence.hpp"
#include "psc/sect/transform.hpp"
#include "psc/smells/detect.hpp"
#include "psc/smells/diagnostics_io.hpp"
#include "psc/stats/robustness.hpp"
#include "psc/util/csv.hpp"
#include "psc/util/io.hpp"
#include "psc/util/random.hpp"

namespace psc::cli {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

struct Context {
    std::ostream& out;
    std::ostream& err;
    bool strict = false;
    bool quiet = false;
    std::uint64_t seed = 0;
    int jobs = 4;
    int failures = 0;

    void info(const std::string& msg) const {
        if (!quiet) err << "psc: " << msg << '\n';
    }
    void warn(const std::string& msg) const { err << "psc: warning: " << msg << '\n'; }
    void fail(const std::string& msg) {
        ++failures;
        err << "psc: " << msg << '\n';
    }
    int status() const { return strict && failures > 0 ? kExitFailure : kExitOk; }
};

struct Snippet {
    std::string id;
    std::string source;
};

// A single .py file, or every .py file of a directory in name order.
std::vector<Snippet> read_snippets(const fs::path& in) {
    std::vector<fs::path> files;
    if (fs::is_directory(in)) {
        for (const auto& e : fs::directory_iterator(in)) {
            if (e.is_regular_file() && e.path().extension() == ".py") files.push_back(e.path());
        }
        std::sort(files.begin(), files.end());
    } else {
        files.push_back(in);
    }
    std::vector<Snippet> out;
    for (const auto& f : files) out.push_back({f.stem().string(), util::read_file(f)});
    return out;
}

std::vector<std::string> split_list(const std::vector<std::string>& items) {
    std::vector<std::string> out;
    for (const auto& item : items) {
        std::stringstream ss(item);
        std::string part;
        while (std::getline(ss, part, ',')) {
            if (!part.empty()) out.push_back(part);
        }
    }
    return out;
}

void write_output(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    util::write_atomic(path, content);
}

// ---------------------------------------------------------------- endpoint

struct EndpointFlags {
    std::string url;
    std::string model = "default";
    double timeout = 60;
    int retries = 2;
    std::string strategy = "greedy";
    std::optional<int> num_beams;
    std::optional<double> penalty_alpha;
    std::optional<int> top_k;
    std::optional<double> top_p;
    double temperature = 1.0;
    int max_new_tokens = 256;
    double cut = 0.5;

    void add_to(CLI::App* app) {
        app->add_option("--endpoint", url, "Base URL of the completions endpoint")->required();
        app->add_option("--model", model, "Model name sent with each request")->capture_default_str();
        app->add_option("--timeout", timeout, "Per-request timeout in seconds")->capture_default_str();
        app->add_option("--retries", retries, "Retries on transport errors, 429 and 5xx")->capture_default_str();
        app->add_option("--strategy", strategy, "greedy|beam|sampling|contrastive|top_k|top_p")
            ->capture_default_str();
        app->add_option("--num-beams", num_beams, "Beam width");
        app->add_option("--penalty-alpha", penalty_alpha, "Contrastive penalty");
        app->add_option("--top-k", top_k, "Top-k cutoff");
        app->add_option("--top-p", top_p, "Nucleus mass");
        app->add_option("--temperature", temperature, "Sampling temperature")->capture_default_str();
        app->add_option("--max-new-tokens", max_new_tokens, "Generation budget")->capture_default_str();
        app->add_option("--cut", cut, "Fraction of snippet tokens kept as the prefix")
            ->capture_default_str()
            ->check(CLI::Range(0.0, 1.0));
    }

    inference::EndpointConfig endpoint(int jobs) const {
        inference::EndpointConfig e;
        e.base_url = url;
        e.model = model;
        e.request_timeout_seconds = timeout;
        e.retries = retries;
        e.max_concurrent = jobs;
        e.validate();
        return e;
    }

    inference::DecodingConfig decoding(std::uint64_t seed) const {
        auto s = inference::parse_strategy(strategy);
        if (!s) throw ConfigError("unknown strategy: " + strategy);
        auto c = inference::DecodingConfig::for_strategy(*s);
        if (num_beams) c.num_beams = num_beams;
        if (penalty_alpha) c.penalty_alpha = penalty_alpha;
        if (top_k) c.top_k = top_k;
        if (top_p) c.top_p = top_p;
        c.temperature = temperature;
        c.max_new_tokens = max_new_tokens;
        if (*s == inference::Strategy::sampling || *s == inference::Strategy::top_k || *s == inference::Strategy::top_p)
            c.seed = util::derive_seed(seed, "decode");
        c.validate();
        return c;
    }
};

// ------------------------------------------------------------------ ingest

struct IngestFlags {
    std::vector<std::string> traces;
    std::string corpus;
    std::string mode = "complete";
    std::string treatment;
    std::string level;
    std::string diagnostics;
    std::string diagnostics_out;
    std::string out;
    EndpointFlags endpoint;
    bool use_endpoint = false;
};

int cmd_ingest(Context& ctx, IngestFlags& f) {
    if (f.traces.empty() && f.corpus.empty() && f.diagnostics.empty())
        throw ConfigError("ingest needs --traces, --corpus or --diagnostics");
    if (!f.diagnostics.empty()) {
        auto records = smells::parse_diagnostics(util::read_file(f.diagnostics));
        std::string text;
        std::size_t n = 0;
        for (auto& r : records) {
            sort_diagnostics(r.smells);
            n += r.smells.size();
            text += smells::to_json(r) + '\n';
        }
        if (!f.diagnostics_out.empty()) write_output(f.diagnostics_out, text);
        ctx.info("diagnostics: " + std::to_string(records.size()) + " records, " + std::to_string(n) + " smells");
    }
    if (f.traces.empty() && f.corpus.empty()) return ctx.status();
    if (f.out.empty()) throw ConfigError("ingest of traces needs --out");

    std::vector<TokenTrace> traces;
    for (const auto& path : f.traces) {
        std::istringstream in(util::read_file(path));
        std::string line;
        int line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
            try {
                traces.push_back(parse_trace_record(line));
            } catch (const Error& e) {
                ctx.fail(path + ": line " + std::to_string(line_no) + ": " + e.what());
            }
        }
    }
    if (!f.corpus.empty()) {
        if (f.endpoint.url.empty()) throw ConfigError("--corpus needs --endpoint");
        auto corpus = read_snippets(f.corpus);
        inference::CompletionClient client(f.endpoint.endpoint(ctx.jobs));
        bool fixed = f.mode == "fixed";
        if (!fixed && f.mode != "complete") throw ConfigError("--mode must be fixed or complete");
        auto decoding = f.endpoint.decoding(ctx.seed);
        std::string level = !f.level.empty() ? f.level : fixed ? "fixed" : std::string(to_string(decoding.strategy));
        auto results = inference::run_bounded(corpus.size(), ctx.jobs, [&](std::size_t i) {
            const auto& s = corpus[i];
            return fixed ? client.score_fixed(s.source, s.id)
                         : client.complete_prefix(s.source, f.endpoint.cut, decoding, s.id);
        });
        for (std::size_t i = 0; i < results.size(); ++i) {
            if (!results[i].value) {
                ctx.fail(corpus[i].id + ": " + results[i].error);
                continue;
            }
            auto t = std::move(*results[i].value);
            if (!f.treatment.empty()) t.meta["treatment"] = f.treatment;
            t.meta["level"] = level;
            traces.push_back(std::move(t));
        }
    }
    if (!f.out.empty()) {
        if (fs::path(f.out).has_parent_path()) fs::create_directories(fs::path(f.out).parent_path());
        inference::write_traces(traces, f.out);
    }
    ctx.info("traces: " + std::to_string(traces.size()) + " written, " + std::to_string(ctx.failures) + " failed");
    return ctx.status();
}

// ------------------------------------------------------------------ detect

struct DetectFlags {
    std::string in;
    std::string out;
    std::vector<std::string> rules;
    int max_line_length = 100;
};

int cmd_detect(Context& ctx, DetectFlags& f) {
    auto rules = f.rules.empty() ? smells::RuleSet::all() : smells::RuleSet::of(split_list(f.rules));
    rules.max_line_length = f.max_line_length;
    std::string text;
    std::size_t total = 0;
    for (const auto& s : read_snippets(f.in)) {
        smells::DiagnosticsRecord r{s.id, smells::detect(s.source, rules, s.id), std::nullopt};
        total += r.smells.size();
        text += smells::to_json(r) + '\n';
    }
    write_output(f.out, text);
    ctx.info("detect: " + std::to_string(total) + " smells");
    return ctx.status();
}

// ------------------------------------------------------------------- score

struct ScoreFlags {
    std::vector<std::string> traces;
    std::string diagnostics;
    std::string out;
    std::string scope = "per_smell_type_batch";
    std::string aggregate = "median";
    double epsilon = kDefaultEpsilon;
    double lambda = kDefaultLambda;
    bool include_prefix = false;
    bool filter = false;
    std::size_t max_tokens = 700;
    std::size_t per_rule_cap = 500;
    std::string frame_out;
    std::string treatment;
    std::string level;
    std::string pos_annotations;
};

std::string level_of(const TokenTrace& t) {
    if (auto it = t.meta.find("level"); it != t.meta.end()) return it->second;
    if (auto it = t.meta.find("decoding"); it != t.meta.end()) return it->second.substr(0, it->second.find('('));
    return "fixed";
}

int cmd_score(Context& ctx, ScoreFlags& f) {
    std::vector<TokenTrace> traces;
    for (const auto& p : f.traces) {
        auto more = inference::read_traces(p);
        traces.insert(traces.end(), std::make_move_iterator(more.begin()), std::make_move_iterator(more.end()));
    }
    std::map<std::string, const TokenTrace*> by_id;
    for (const auto& t : traces) {
        if (!by_id.emplace(t.sample_id, &t).second) throw SchemaError("duplicate trace sample_id: " + t.sample_id);
    }
    auto diags = smells::ingest_diagnostics(f.diagnostics);

    std::vector<AlignedSmell> batch;
    for (const auto& d : diags) {
        auto it = by_id.find(d.sample_id);
        if (it == by_id.end()) {
            ctx.fail(d.sample_id + ": no trace for " + d.rule_id);
            continue;
        }
        try {
            auto span = align(d, *it->second);
            if (it->second->generated_from && !f.include_prefix && !in_generated_segment(span, *it->second)) continue;
            batch.push_back({it->second, d, span});
        } catch (const Error& e) {
            ctx.fail(d.sample_id + ": " + d.rule_id + ": " + e.what());
        }
    }

    if (f.filter) {
        std::vector<CorpusEntry> entries;
        for (std::size_t i = 0; i < batch.size(); ++i)
            entries.push_back({batch[i].diag.sample_id, batch[i].diag.rule_id, batch[i].trace->size(), i});
        auto kept = filter_corpus(entries, {f.max_tokens, f.per_rule_cap, ctx.seed});
        std::vector<AlignedSmell> filtered;
        for (const auto& e : kept) filtered.push_back(std::move(batch[e.index]));
        ctx.info("filter: kept " + std::to_string(filtered.size()) + " of " + std::to_string(batch.size()));
        batch = std::move(filtered);
    }

    ScoreOptions options;
    if (f.scope == "global_batch") options.scope = BoundsScope::global_batch;
    else if (f.scope != "per_smell_type_batch") throw ConfigError("unknown scope: " + f.scope);
    if (f.aggregate == "mean") options.selected = Aggregate::mean;
    else if (f.aggregate == "relative") options.selected = Aggregate::relative;
    else if (f.aggregate != "median") throw ConfigError("unknown aggregate: " + f.aggregate);
    options.epsilon = f.epsilon;
    options.lambda = f.lambda;

    auto scores = score_batch(batch, options);
    write_output(f.out, scores_csv(scores));
    ctx.info("score: " + std::to_string(scores.size()) + " spans");

    if (!f.frame_out.empty()) {
        std::map<std::string, causal::PosCounts> pos;
        if (!f.pos_annotations.empty()) pos = causal::parse_pos_annotations(util::read_file(f.pos_annotations));
        causal::ExperimentFrame frame{causal::feature_names(), {}};
        std::map<std::string, std::vector<double>> features;
        for (std::size_t i = 0; i < scores.size(); ++i) {
            const auto& t = *batch[i].trace;
            auto fit = features.find(t.sample_id);
            if (fit == features.end()) {
                std::optional<causal::PosCounts> over;
                if (auto p = pos.find(t.sample_id); p != pos.end()) over = p->second;
                fit = features.emplace(t.sample_id, causal::feature_values(causal::extract_features(t.source, over)))
                          .first;
            }
            std::string treatment = f.treatment;
            if (treatment.empty()) {
                auto m = t.meta.find("treatment");
                treatment = m != t.meta.end() ? m->second : "T1";
            }
            frame.rows.push_back({scores[i].sample_id, scores[i].rule_id, treatment,
                                  f.level.empty() ? level_of(t) : f.level, scores[i].psc_median,
                                  scores[i].psc_relative, fit->second});
        }
        write_output(f.frame_out, causal::frame_csv(frame));
    }
    return ctx.status();
}

// --------------------------------------------------------------- transform

struct TransformFlags {
    std::string in;
    std::string out;
    std::vector<std::string> kinds;
    std::string selector = "all";
    std::string substitute_url;
    std::string check;
    std::string python = "python3";
};

int cmd_transform(Context& ctx, TransformFlags& f) {
    std::vector<sect::TransformKind> kinds;
    for (const auto& k : split_list(f.kinds)) {
        if (k == "all") {
            kinds.assign(std::begin(sect::kAllKinds), std::end(sect::kAllKinds));
            continue;
        }
        auto kind = sect::parse_kind(k);
        if (!kind) throw ConfigError("unknown transformation: " + k);
        kinds.push_back(*kind);
    }
    if (kinds.empty()) kinds.assign(std::begin(sect::kAllKinds), std::end(sect::kAllKinds));
    auto selector = sect::parse_selector(f.selector);
    if (!selector) throw ConfigError("unknown site selector: " + f.selector);

    std::unique_ptr<sect::SubstituteProvider> provider;
    if (!f.substitute_url.empty()) provider = std::make_unique<sect::HttpSubstituteProvider>(f.substitute_url);

    std::map<std::string, std::vector<sect::CallSpec>> calls;
    if (!f.check.empty()) {
        for (auto& [id, specs] : sect::parse_call_specs(util::read_file(f.check))) calls[id] = std::move(specs);
    }

    fs::create_directories(f.out);
    json variants = json::array();
    std::vector<sect::EquivalenceCase> cases;
    std::vector<std::size_t> case_variant;
    for (const auto& s : read_snippets(f.in)) {
        for (auto kind : kinds) {
            sect::TransformOptions options;
            options.selector = *selector;
            options.seed = util::derive_seed(ctx.seed, "transform|" + s.id + "|" + std::string(to_string(kind)));
            options.provider = provider.get();
            try {
                auto r = sect::transform(s.source, kind, options);
                std::string file = s.id + "." + std::string(to_string(kind)) + ".py";
                write_output(fs::path(f.out) / file, r.output);
                json sites = json::array();
                for (const auto& site : r.record.applied_sites) sites.push_back({site.begin, site.end});
                variants.push_back({{"sample_id", s.id},
                                    {"kind", to_string(kind)},
                                    {"file", file},
                                    {"applied_sites", sites}});
                if (auto c = calls.find(s.id); c != calls.end()) {
                    cases.push_back({s.source, r.output, c->second});
                    case_variant.push_back(variants.size() - 1);
                }
            } catch (const Error& e) {
                ctx.fail(s.id + ": " + std::string(to_string(kind)) + ": " + e.what());
            }
        }
    }
    if (!cases.empty()) {
        sect::HarnessOptions options;
        options.python = f.python;
        auto results = sect::check_equivalence(cases, options);
        std::size_t diverging = 0;
        for (std::size_t i = 0; i < results.size(); ++i) {
            auto& v = variants[case_variant[i]];
            v["equivalent"] = results[i].equivalent;
            if (!results[i].equivalent) {
                ++diverging;
                v["differences"] = results[i].differences;
                ctx.fail(v["file"].get<std::string>() + ": behavior differs");
            }
        }
        ctx.info("equivalence: " + std::to_string(cases.size()) + " checked, " + std::to_string(diverging) +
                 " diverging");
    }
    json manifest = {{"selector", to_string(*selector)}, {"seed", ctx.seed}, {"variants", variants}};
    write_output(fs::path(f.out) / "manifest.json", manifest.dump(2) + '\n');
    ctx.info("transform: " + std::to_string(variants.size()) + " variants");
    return ctx.status();
}

// -------------------------------------------------------------- robustness

struct RobustnessFlags {
    std::string scores;
    std::string out;
    double alpha = 0.05;
    double min_eta2 = 0.1;
    bool t_ci = false;
    bool skip_degenerate = false;
};

int cmd_robustness(Context& ctx, RobustnessFlags& f) {
    auto scores = parse_scores_csv(util::read_file(f.scores));
    stats::RobustnessOptions options;
    options.alpha = f.alpha;
    options.min_eta_squared = f.min_eta2;
    options.t_based_ci = f.t_ci;
    options.skip_degenerate = f.skip_degenerate;
    std::vector<std::string> warnings;
    auto rows = stats::robustness_report(scores, options, &warnings);
    for (const auto& w : warnings) ctx.warn(w);
    write_output(f.out, stats::anova_csv(rows));
    ctx.info("robustness: " + std::to_string(rows.size()) + " rules");
    return ctx.status();
}

// ---------------------------------------------------------------- infogain

struct InfogainFlags {
    std::string severity;
    std::vector<std::string> traces;
    std::string diagnostics;
    std::string scores;
    std::string metrics_csv;
    std::vector<std::string> metrics;
    int bins = infogain::kDefaultBins;
    std::string severity_out;
    std::string out;
};

// One row per (sample, rule) seen in the scores; metrics are per-sample means.
infogain::SeverityDataset build_severity(Context& ctx, const InfogainFlags& f) {
    std::map<std::string, TokenTrace> traces;
    for (const auto& p : f.traces) {
        for (auto& t : inference::read_traces(p)) traces.emplace(t.sample_id, std::move(t));
    }
    std::map<std::pair<std::string, std::string>, std::vector<SmellDiagnostic>> diags;
    for (auto& d : smells::ingest_diagnostics(f.diagnostics)) diags[{d.sample_id, d.rule_id}].push_back(d);

    struct Acc {
        double mean = 0, median = 0, relative = 0;
        int n = 0;
    };
    std::map<std::pair<std::string, std::string>, Acc> acc;
    for (const auto& s : parse_scores_csv(util::read_file(f.scores))) {
        auto& a = acc[{s.sample_id, s.rule_id}];
        a.mean += s.psc_mean;
        a.median += s.psc_median;
        a.relative += s.psc_relative;
        ++a.n;
    }
    infogain::SeverityDataset data;
    for (const auto& [key, a] : acc) {
        auto t = traces.find(key.first);
        if (t == traces.end()) {
            ctx.fail(key.first + ": no trace for severity labelling");
            continue;
        }
        auto count = infogain::label_severity(t->second, diags[key]);
        data.rows.push_back({key.first,
                             key.second,
                             count.n_s,
                             count.n_t,
                             count.label,
                             {{"psc_mean", a.mean / a.n}, {"psc_median", a.median / a.n}, {"psc_relative", a.relative / a.n}}});
    }
    return data;
}

int cmd_infogain(Context& ctx, InfogainFlags& f) {
    infogain::SeverityDataset data;
    if (!f.severity.empty()) {
        data = infogain::parse_severity_csv(util::read_file(f.severity));
    } else if (!f.traces.empty() && !f.diagnostics.empty() && !f.scores.empty()) {
        data = build_severity(ctx, f);
    } else {
        throw ConfigError("infogain needs --severity or all of --traces, --diagnostics and --scores");
    }
    if (!f.metrics_csv.empty()) infogain::merge_metrics_csv(data, util::read_file(f.metrics_csv));
    if (!f.severity_out.empty()) write_output(f.severity_out, infogain::severity_csv(data));

    auto metrics = split_list(f.metrics);
    if (metrics.empty()) {
        std::set<std::string> names;
        for (const auto& r : data.rows)
            for (const auto& [m, v] : r.metrics) names.insert(m);
        metrics.assign(names.begin(), names.end());
    }
    std::vector<std::string> warnings;
    auto rows = infogain::ig_report(data, metrics, f.bins, &warnings);
    for (const auto& w : warnings) ctx.warn(w);
    write_output(f.out, infogain::ig_csv(rows));
    ctx.info("infogain: " + std::to_string(rows.size()) + " rows");
    return ctx.status();
}

// ------------------------------------------------------------------ causal

struct CausalFlags {
    std::vector<std::string> frames;
    std::string out;
    std::string outcome = "y1";
    std::vector<std::string> controls;
    std::size_t min_rows = 30;
    double kappa = 0.3;
    int subsets = 20;
    double subset_fraction = 0.8;
};

int cmd_causal(Context& ctx, CausalFlags& f) {
    causal::ExperimentFrame frame;
    for (std::size_t i = 0; i < f.frames.size(); ++i) {
        auto part = causal::parse_frame_csv(util::read_file(f.frames[i]));
        if (i == 0) frame.feature_names = part.feature_names;
        else if (part.feature_names != frame.feature_names)
            throw SchemaError(f.frames[i] + ": feature columns differ from " + f.frames[0]);
        frame.rows.insert(frame.rows.end(), part.rows.begin(), part.rows.end());
    }
    causal::ReportOptions options;
    if (f.outcome == "y0") options.estimate.outcome = causal::Outcome::y0;
    else if (f.outcome != "y1") throw ConfigError("--outcome must be y1 or y0");
    options.estimate.min_rows = f.min_rows;
    options.refute.seed = util::derive_seed(ctx.seed, "causal");
    options.refute.kappa = f.kappa;
    options.refute.subsets = f.subsets;
    options.refute.subset_fraction = f.subset_fraction;
    for (const auto& c : split_list(f.controls)) {
        auto eq = c.find('=');
        if (eq == std::string::npos || eq == 0 || eq + 1 == c.size())
            throw ConfigError("--control expects FAMILY=LEVEL, got " + c);
        options.controls[c.substr(0, eq)] = c.substr(eq + 1);
    }
    std::vector<std::string> warnings;
    auto rows = causal::causal_report(frame, options, &warnings);
    for (const auto& w : warnings) ctx.warn(w);
    write_output(f.out, causal::causal_csv(rows));
    ctx.info("causal: " + std::to_string(rows.size()) + " effects");
    return ctx.status();
}

// ---------------------------------------------------------------- mitigate

struct MitigateFlags {
    std::string corpus;
    std::string baseline = "p0_minimal";
    std::string treatment = "p3_structured";
    std::vector<std::string> avoid;
    double lambda = kDefaultLambda;
    std::string out;
    std::string summary_out;
    std::string incomplete_out;
    std::string plot_dir;
    EndpointFlags endpoint;
};

std::vector<mitigation::MitigationSample> read_mitigation_corpus(const fs::path& dir) {
    auto manifest = util::read_csv(dir / "manifest.csv");
    auto id_col = manifest.column("sample_id");
    auto rule_col = manifest.column("rule_id");
    std::vector<mitigation::MitigationSample> out;
    for (const auto& row : manifest.rows)
        out.push_back({row[id_col], row[rule_col], util::read_file(dir / (row[id_col] + ".py"))});
    return out;
}

int cmd_mitigate(Context& ctx, MitigateFlags& f) {
    auto corpus = read_mitigation_corpus(f.corpus);
    auto prompt = [&](const std::string& name) {
        auto id = mitigation::parse_prompt_id(name);
        if (!id) throw ConfigError("unknown prompt: " + name);
        auto avoid = split_list(f.avoid);
        return mitigation::PromptTemplate::builtin(
            *id, avoid.empty() ? std::nullopt : std::optional<std::vector<std::string>>(avoid));
    };
    mitigation::MitigationOptions options;
    options.baseline = prompt(f.baseline);
    options.treatment = prompt(f.treatment);
    options.decoding = f.endpoint.decoding(ctx.seed);
    options.cut_fraction = f.endpoint.cut;
    options.lambda = f.lambda;
    options.max_concurrent = ctx.jobs;
    inference::CompletionClient client(f.endpoint.endpoint(ctx.jobs));

    auto result = mitigation::run_mitigation(corpus, options, client);
    for (const auto& inc : result.incomplete) ctx.fail(inc.sample_id + ": incomplete: " + inc.reason);
    write_output(f.out, mitigation::paired_csv(result.rows));
    if (!f.incomplete_out.empty()) write_output(f.incomplete_out, mitigation::incomplete_csv(result.incomplete));
    auto summary = mitigation::summarize(result.rows, f.lambda);
    if (!f.summary_out.empty()) write_output(f.summary_out, mitigation::summary_csv(summary));
    if (!f.plot_dir.empty()) {
        std::map<std::string, std::map<mitigation::Condition, mitigation::BoxStats>> boxes;
        for (const auto& s : summary) boxes[s.rule_id][s.condition] = s.stats;
        for (auto& [rule, by] : boxes) {
            write_output(fs::path(f.plot_dir) / ("mitigation_" + rule + ".svg"),
                         mitigation::boxplot_svg(rule, by[mitigation::Condition::baseline],
                                                 by[mitigation::Condition::treatment], f.lambda));
        }
    }
    for (const auto& [rule, gap] : mitigation::median_gaps(summary))
        ctx.info("mitigate: " + rule + " median gap " + util::format_double(gap));
    return ctx.status();
}

// ------------------------------------------------------------------ report

struct ReportFlags {
    std::string anova;
    std::string ig;
    std::string causal;
    std::string mitigation;
    std::string out;
    std::string plot_dir;
};

std::string markdown_table(const util::CsvTable& t) {
    auto cell = [](const std::string& s) {
        std::string o;
        for (char c : s) {
            if (c == '|') o += "\\|";
            else if (c == '\n') o += ' ';
            else o += c;
        }
        return o;
    };
    std::string md = "|";
    for (const auto& h : t.header) md += " " + cell(h) + " |";
    md += "\n|";
    for (std::size_t i = 0; i < t.header.size(); ++i) md += " --- |";
    md += '\n';
    for (const auto& row : t.rows) {
        md += "|";
        for (const auto& v : row) md += " " + cell(v) + " |";
        md += '\n';
    }
    return md;
}

std::string xml_escape(const std::string& s) {
    std::string o;
    for (char c : s) {
        switch (c) {
            case '&': o += "&amp;"; break;
            case '<': o += "&lt;"; break;
            case '>': o += "&gt;"; break;
            case '"': o += "&quot;"; break;
            default: o += c;
        }
    }
    return o;
}

// Horizontal bars of ig_bits per metric for one rule.
std::string ig_bar_svg(const std::string& rule, const std::vector<std::pair<std::string, double>>& bars) {
    const int width = 480, left = 140, bar_h = 22, gap = 8, top = 40;
    const int height = top + static_cast<int>(bars.size()) * (bar_h + gap) + 30;
    double max_v = 0;
    for (const auto& b : bars) max_v = std::max(max_v, b.second);
    if (max_v <= 0) max_v = 1;
    std::ostringstream s;
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    s << "<text x=\"" << width / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" << xml_escape(rule)
      << " information gain (bits)</text>\n";
    int y = top;
    for (const auto& [name, v] : bars) {
        int w = static_cast<int>((width - left - 60) * (std::max(v, 0.0) / max_v));
        s << "<text x=\"" << left - 6 << "\" y=\"" << y + 15 << "\" text-anchor=\"end\">" << xml_escape(name)
          << "</text>\n";
        s << "<rect x=\"" << left << "\" y=\"" << y << "\" width=\"" << w << "\" height=\"" << bar_h
          << "\" fill=\"#4c72b0\"/>\n";
        s << "<text x=\"" << left + w + 4 << "\" y=\"" << y + 15 << "\">" << util::format_double(v) << "</text>\n";
        y += bar_h + gap;
    }
    s << "</svg>\n";
    return s.str();
}

int cmd_report(Context& ctx, ReportFlags& f) {
    if (f.anova.empty() && f.ig.empty() && f.causal.empty() && f.mitigation.empty())
        throw ConfigError("report needs at least one of --anova, --ig, --causal, --mitigation");
    std::string md = "# PSC report\n";
    if (!f.anova.empty()) md += "\n## Robustness (ANOVA over transformations)\n\n" + markdown_table(util::read_csv(f.anova));
    if (!f.ig.empty()) {
        auto t = util::read_csv(f.ig);
        md += "\n## Information gain\n\n" + markdown_table(t);
        if (!f.plot_dir.empty()) {
            std::map<std::string, std::vector<std::pair<std::string, double>>> by_rule;
            auto r = t.column("rule_id"), m = t.column("metric"), v = t.column("ig_bits");
            for (const auto& row : t.rows) by_rule[row[r]].push_back({row[m], util::parse_double(row[v], "ig_bits")});
            for (const auto& [rule, bars] : by_rule)
                write_output(fs::path(f.plot_dir) / ("ig_" + rule + ".svg"), ig_bar_svg(rule, bars));
        }
    }
    if (!f.causal.empty()) md += "\n## Causal effects\n\n" + markdown_table(util::read_csv(f.causal));
    if (!f.mitigation.empty()) {
        auto rows = mitigation::parse_paired_csv(util::read_file(f.mitigation));
        auto summary = mitigation::summarize(rows);
        md += "\n## Mitigation\n\n" + markdown_table(util::parse_csv(mitigation::summary_csv(summary)));
        md += "\n| rule_id | median gap |\n| --- | --- |\n";
        for (const auto& [rule, gap] : mitigation::median_gaps(summary))
            md += "| " + rule + " | " + util::format_double(gap) + " |\n";
        if (!f.plot_dir.empty()) {
            std::map<std::string, std::map<mitigation::Condition, mitigation::BoxStats>> boxes;
            for (const auto& s : summary) boxes[s.rule_id][s.condition] = s.stats;
            for (auto& [rule, by] : boxes)
                write_output(fs::path(f.plot_dir) / ("mitigation_" + rule + ".svg"),
                             mitigation::boxplot_svg(rule, by[mitigation::Condition::baseline],
                                                     by[mitigation::Condition::treatment]));
        }
    }
    write_output(f.out, md);
    ctx.info("report: " + f.out);
    return ctx.status();
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Context ctx{out, err};
    CLI::App app{"Propensity smelly score toolkit", "psc"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_config("--config", "", "key=value file mirroring the flags; [subcommand] sections or dotted keys");
    app.allow_config_extras(false);
    app.add_option("--seed", ctx.seed, "Global seed; per-task seeds are derived from it")->capture_default_str();
    app.add_option("--jobs", ctx.jobs, "Upper bound on concurrent work")->capture_default_str()->check(CLI::PositiveNumber);
    app.add_flag("--strict", ctx.strict, "Exit 1 when any sample fails");
    app.add_flag("--quiet", ctx.quiet, "Only print warnings and errors");

    std::function<int()> action;

    IngestFlags ingest;
    auto* s_ingest = app.add_subcommand("ingest", "Validate trace and diagnostics files, or collect traces from an endpoint");
    s_ingest->add_option("--traces", ingest.traces, "Trace JSONL files to validate")->check(CLI::ExistingFile);
    s_ingest->add_option("--corpus", ingest.corpus, "Snippet file or directory to send to --endpoint")
        ->check(CLI::ExistingPath);
    s_ingest->add_option("--mode", ingest.mode, "complete (prefix completion) or fixed (teacher forcing)")
        ->capture_default_str();
    s_ingest->add_option("--treatment", ingest.treatment, "Treatment family recorded in trace meta");
    s_ingest->add_option("--level", ingest.level, "Treatment level recorded in trace meta (default: strategy)");
    s_ingest->add_option("--diagnostics", ingest.diagnostics, "Diagnostics JSON/JSONL to validate")
        ->check(CLI::ExistingFile);
    s_ingest->add_option("--diagnostics-out", ingest.diagnostics_out, "Normalized diagnostics JSONL");
    s_ingest->add_option("--out", ingest.out, "Trace JSONL output");
    ingest.endpoint.add_to(s_ingest);
    s_ingest->get_option("--endpoint")->required(false);
    s_ingest->callback([&] { action = [&] { return cmd_ingest(ctx, ingest); }; });

    DetectFlags detect;
    auto* s_detect = app.add_subcommand("detect", "Run the native smell detectors");
    s_detect->add_option("--in", detect.in, "Snippet file or directory")->required()->check(CLI::ExistingPath);
    s_detect->add_option("--out", detect.out, "Diagnostics JSONL output")->required();
    s_detect->add_option("--rules", detect.rules, "Comma-separated rule ids (default: all)");
    s_detect->add_option("--max-line-length", detect.max_line_length, "C0301 limit")->capture_default_str();
    s_detect->callback([&] { action = [&] { return cmd_detect(ctx, detect); }; });

    ScoreFlags score;
    auto* s_score = app.add_subcommand("score", "Align diagnostics to traces and score each smell span");
    s_score->add_option("--traces", score.traces, "Trace JSONL files")->required()->check(CLI::ExistingFile);
    s_score->add_option("--diagnostics", score.diagnostics, "Diagnostics JSON/JSONL")
        ->required()
        ->check(CLI::ExistingFile);
    s_score->add_option("--out", score.out, "Scores CSV output")->required();
    s_score->add_option("--scope", score.scope, "per_smell_type_batch|global_batch")->capture_default_str();
    s_score->add_option("--aggregate", score.aggregate, "Score used for propense: mean|median|relative")
        ->capture_default_str();
    s_score->add_option("--epsilon", score.epsilon, "Relative score denominator guard")->capture_default_str();
    s_score->add_option("--lambda", score.lambda, "Propensity threshold")->capture_default_str();
    s_score->add_flag("--include-prefix", score.include_prefix, "Also score smells outside the generated segment");
    s_score->add_flag("--filter", score.filter, "Apply the corpus filter before scoring");
    s_score->add_option("--max-tokens", score.max_tokens, "Filter: drop samples with more tokens")
        ->capture_default_str();
    s_score->add_option("--per-rule-cap", score.per_rule_cap, "Filter: instances kept per rule")
        ->capture_default_str();
    s_score->add_option("--frame-out", score.frame_out, "Also write an experiment frame CSV");
    s_score->add_option("--treatment", score.treatment, "Frame treatment family (default: trace meta or T1)");
    s_score->add_option("--level", score.level, "Frame treatment level (default: trace meta)");
    s_score->add_option("--pos-annotations", score.pos_annotations, "POS counts CSV overriding the tagger")
        ->check(CLI::ExistingFile);
    s_score->callback([&] { action = [&] { return cmd_score(ctx, score); }; });

    TransformFlags transform;
    auto* s_transform = app.add_subcommand("transform", "Write semantic-preserving variants of each snippet");
    s_transform->add_option("--in", transform.in, "Snippet file or directory")->required()->check(CLI::ExistingPath);
    s_transform->add_option("--out", transform.out, "Output directory")->required();
    s_transform->add_option("--kind", transform.kinds, "Comma-separated kinds or all (default: all)");
    s_transform->add_option("--selector", transform.selector, "all|first|seeded_random")->capture_default_str();
    s_transform->add_option("--substitute-url", transform.substitute_url, "Rename suggestion service base URL");
    s_transform->add_option("--check", transform.check, "Harness JSON of calls; verifies behavior is unchanged")
        ->check(CLI::ExistingFile);
    s_transform->add_option("--python", transform.python, "Interpreter for --check")->capture_default_str();
    s_transform->callback([&] { action = [&] { return cmd_transform(ctx, transform); }; });

    RobustnessFlags robustness;
    auto* s_rob = app.add_subcommand("robustness", "Per-rule ANOVA of scores across transformation variants");
    s_rob->add_option("--scores", robustness.scores, "Scores CSV")->required()->check(CLI::ExistingFile);
    s_rob->add_option("--out", robustness.out, "ANOVA CSV output")->required();
    s_rob->add_option("--alpha", robustness.alpha, "Significance level")->capture_default_str();
    s_rob->add_option("--min-eta2", robustness.min_eta2, "Effect size needed to flag a rule")->capture_default_str();
    s_rob->add_flag("--t-ci", robustness.t_ci, "Use the t quantile for the CI");
    s_rob->add_flag("--skip-degenerate", robustness.skip_degenerate, "Skip untestable rules instead of failing");
    s_rob->callback([&] { action = [&] { return cmd_robustness(ctx, robustness); }; });

    InfogainFlags ig;
    auto* s_ig = app.add_subcommand("infogain", "Information gain of each metric about smell severity");
    s_ig->add_option("--severity", ig.severity, "Severity dataset CSV")->check(CLI::ExistingFile);
    s_ig->add_option("--traces", ig.traces, "Trace JSONL files (builds the dataset)")->check(CLI::ExistingFile);
    s_ig->add_option("--diagnostics", ig.diagnostics, "Diagnostics JSON/JSONL (builds the dataset)")
        ->check(CLI::ExistingFile);
    s_ig->add_option("--scores", ig.scores, "Scores CSV (builds the dataset)")->check(CLI::ExistingFile);
    s_ig->add_option("--metrics-csv", ig.metrics_csv, "Extra metrics: sample_id,rule_id,metric_name,value")
        ->check(CLI::ExistingFile);
    s_ig->add_option("--metric", ig.metrics, "Comma-separated metric names (default: all)");
    s_ig->add_option("--bins", ig.bins, "Equal-frequency bins")->capture_default_str()->check(CLI::PositiveNumber);
    s_ig->add_option("--severity-out", ig.severity_out, "Write the severity dataset CSV");
    s_ig->add_option("--out", ig.out, "Information gain CSV output")->required();
    s_ig->callback([&] { action = [&] { return cmd_infogain(ctx, ig); }; });

    CausalFlags causal;
    auto* s_causal = app.add_subcommand("causal", "Backdoor-adjusted treatment effects with refutations");
    s_causal->add_option("--frame", causal.frames, "Experiment frame CSV files")->required()->check(CLI::ExistingFile);
    s_causal->add_option("--out", causal.out, "Causal CSV output")->required();
    s_causal->add_option("--outcome", causal.outcome, "y1 (median PSC) or y0 (relative PSC)")->capture_default_str();
    s_causal->add_option("--control", causal.controls, "FAMILY=LEVEL control overrides, e.g. T2=small");
    s_causal->add_option("--min-rows", causal.min_rows, "Rows needed per level")->capture_default_str();
    s_causal->add_option("--kappa", causal.kappa, "Unobserved confounder strength")->capture_default_str();
    s_causal->add_option("--subsets", causal.subsets, "Data subset refuter repetitions")->capture_default_str();
    s_causal->add_option("--subset-fraction", causal.subset_fraction, "Data subset size")->capture_default_str();
    s_causal->callback([&] { action = [&] { return cmd_causal(ctx, causal); }; });

    MitigateFlags mitigate;
    auto* s_mit = app.add_subcommand("mitigate", "Compare scores under a baseline and a smell-avoiding prompt");
    s_mit->add_option("--corpus", mitigate.corpus, "Directory with manifest.csv and <sample_id>.py files")
        ->required()
        ->check(CLI::ExistingDirectory);
    s_mit->add_option("--baseline", mitigate.baseline, "Baseline prompt id")->capture_default_str();
    s_mit->add_option("--treatment", mitigate.treatment, "Treatment prompt id")->capture_default_str();
    s_mit->add_option("--avoid", mitigate.avoid, "Comma-separated rule ids listed by p3");
    s_mit->add_option("--lambda", mitigate.lambda, "Propensity threshold")->capture_default_str();
    s_mit->add_option("--out", mitigate.out, "Paired CSV output")->required();
    s_mit->add_option("--summary-out", mitigate.summary_out, "Per-rule summary CSV");
    s_mit->add_option("--incomplete-out", mitigate.incomplete_out, "Incomplete pairs CSV");
    s_mit->add_option("--plot-dir", mitigate.plot_dir, "Directory for per-rule SVG boxplots");
    mitigate.endpoint.add_to(s_mit);
    s_mit->callback([&] { action = [&] { return cmd_mitigate(ctx, mitigate); }; });

    ReportFlags report;
    auto* s_report = app.add_subcommand("report", "Collect result CSVs into a markdown report");
    s_report->add_option("--anova", report.anova, "ANOVA CSV")->check(CLI::ExistingFile);
    s_report->add_option("--ig", report.ig, "Information gain CSV")->check(CLI::ExistingFile);
    s_report->add_option("--causal", report.causal, "Causal CSV")->check(CLI::ExistingFile);
    s_report->add_option("--mitigation", report.mitigation, "Paired mitigation CSV")->check(CLI::ExistingFile);
    s_report->add_option("--out", report.out, "Markdown output")->required();
    s_report->add_option("--plot-dir", report.plot_dir, "Directory for SVG charts");
    s_report->callback([&] { action = [&] { return cmd_report(ctx, report); }; });

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        const CLI::App* target = &app;
        for (auto* sub : app.get_subcommands()) target = sub;
        out << target->help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "psc: " << e.what() << '\n';
        const CLI::App* target = &app;
        for (auto* sub : app.get_subcommands()) target = sub;
        err << target->help();
        return kExitUsage;
    }

    try {
        return action ? action() : kExitUsage;
    } catch (const ConfigError& e) {
        err << "psc: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "psc: error: " << e.what() << '\n';
        return kExitFailure;
    }
}

int run(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return run(args, std::cout, std::cerr);
}

}  // namespace psc::cli
