#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <map>
#include <sstream>

#include <json.hpp>
#include <unistd.h>

#include "app.hpp"
#include "psc/cli/filter.hpp"
#include "psc/inference/client.hpp"
#include "psc/inference/stub_server.hpp"
#include "psc/score/psc.hpp"
#include "psc/util/csv.hpp"
#include "psc/util/io.hpp"

namespace fs = std::filesystem;
using namespace psc;

namespace {

const fs::path kData = fs::path(PSC_TEST_DATA_DIR) / "corpus";

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run psc_run(std::vector<std::string> args) {
    std::ostringstream out, err;
    args.insert(args.begin(), "--quiet");
    int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
    auto dir = fs::temp_directory_path() / ("psc_test_cli_" + std::to_string(::getpid())) / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

// Teacher-forced trace built locally with the stub tokenizer.
TokenTrace local_trace(const std::string& id, const std::string& source) {
    TokenTrace t;
    t.sample_id = id;
    t.source = source;
    std::size_t at = 0;
    for (const auto& tok : inference::stub_tokenize(source)) {
        t.tokens.push_back({tok, at, at + tok.size(), inference::stub_logprob(tok)});
        at += tok.size();
    }
    return t;
}

fs::path golden_traces(const fs::path& dir) {
    std::vector<TokenTrace> traces;
    for (const auto& e : fs::directory_iterator(kData / "golden")) {
        if (e.path().extension() == ".py")
            traces.push_back(local_trace(e.path().stem().string(), util::read_file(e.path())));
    }
    std::sort(traces.begin(), traces.end(), [](const auto& a, const auto& b) { return a.sample_id < b.sample_id; });
    auto p = dir / "traces.jsonl";
    inference::write_traces(traces, p);
    return p;
}

}  // namespace

TEST_CASE("usage errors") {
    CHECK(psc_run({"score", "--bogus"}).code == cli::kExitUsage);
    CHECK(psc_run({"score"}).code == cli::kExitUsage);
    CHECK(psc_run({"frobnicate"}).code == cli::kExitUsage);
    CHECK(psc_run({}).code == cli::kExitUsage);
    auto help = psc_run({"score", "--help"});
    CHECK(help.code == cli::kExitOk);
    CHECK(help.out.find("--traces") != std::string::npos);
    auto dir = scratch("usage");
    CHECK(psc_run({"score", "--traces", golden_traces(dir).string(), "--diagnostics",
                   (kData / "golden" / "g01_unused_import.json").string(), "--out", (dir / "s.csv").string(),
                   "--scope", "sideways"})
              .code == cli::kExitUsage);
}

TEST_CASE("score a single sample") {
    auto dir = scratch("score");
    auto traces = golden_traces(dir);
    auto r = psc_run({"score", "--traces", traces.string(), "--diagnostics",
                      (kData / "golden" / "g01_unused_import.json").string(), "--out", (dir / "scores.csv").string()});
    CHECK(r.code == cli::kExitOk);
    auto scores = parse_scores_csv(util::read_file(dir / "scores.csv"));
    REQUIRE(scores.size() == 3);
    auto unused = std::find_if(scores.begin(), scores.end(), [](const auto& s) { return s.rule_id == "W0611"; });
    REQUIRE(unused != scores.end());
    CHECK(unused->sample_id == "g01_unused_import");
    CHECK(unused->span.i == 0);
    auto trace = local_trace("g01_unused_import", util::read_file(kData / "golden" / "g01_unused_import.py"));
    CHECK(unused->psc_mean == doctest::Approx(psc_mean(trace, unused->span)));
    CHECK(unused->propense == (unused->psc_median >= 0.5));
}

TEST_CASE("config file values yield to flags") {
    auto dir = scratch("config");
    auto traces = golden_traces(dir);
    auto diags = (kData / "golden" / "g01_unused_import.json").string();
    util::write_atomic(dir / "psc.toml", "[score]\nlambda = 1.0\n");
    auto none = [&](const fs::path& out, std::vector<std::string> extra) {
        std::vector<std::string> args{"--config", (dir / "psc.toml").string(), "score", "--traces", traces.string(),
                                      "--diagnostics", diags, "--out", out.string()};
        args.insert(args.end(), extra.begin(), extra.end());
        REQUIRE(psc_run(args).code == cli::kExitOk);
        return parse_scores_csv(util::read_file(out));
    };
    for (const auto& s : none(dir / "a.csv", {})) CHECK_FALSE(s.propense);
    for (const auto& s : none(dir / "b.csv", {"--lambda", "0"})) CHECK(s.propense);

    util::write_atomic(dir / "bad.toml", "[score]\nlambada = 1.0\n");
    CHECK(psc_run({"--config", (dir / "bad.toml").string(), "score", "--traces", traces.string(), "--diagnostics",
                   diags, "--out", (dir / "c.csv").string()})
              .code == cli::kExitUsage);
}

TEST_CASE("robustness on identical groups") {
    auto dir = scratch("robustness");
    std::vector<SmellSpanScore> scores;
    for (const char* variant : {"", ".Add2Equal", ".RenameVariable1"}) {
        for (int k = 0; k < 4; ++k) {
            for (const char* rule : {"W0611", "C0303"}) {
                SmellSpanScore s;
                s.sample_id = "s" + std::to_string(k) + variant;
                s.rule_id = rule;
                s.span = {0, 1, Coverage::exact};
                s.psc_relative = 0.2 + 0.15 * k;
                scores.push_back(s);
            }
        }
    }
    util::write_atomic(dir / "scores.csv", scores_csv(scores));
    auto r = psc_run({"robustness", "--scores", (dir / "scores.csv").string(), "--out", (dir / "anova.csv").string()});
    CHECK(r.code == cli::kExitOk);
    auto table = util::read_csv(dir / "anova.csv");
    REQUIRE(table.rows.size() == 2);
    auto flag = std::find(table.header.begin(), table.header.end(), "robust_flag") - table.header.begin();
    for (const auto& row : table.rows) CHECK(row[flag] == "true");
}

TEST_CASE("strict mode turns sample failures into exit 1") {
    auto dir = scratch("strict");
    auto good = inference::traces_jsonl({local_trace("a", "x = 1\n")});
    util::write_atomic(dir / "t.jsonl", good + "{\"sample_id\": \"b\", \"tokens\": 7}\n");
    auto out = (dir / "out.jsonl").string();
    CHECK(psc_run({"ingest", "--traces", (dir / "t.jsonl").string(), "--out", out}).code == cli::kExitOk);
    CHECK(inference::read_traces(out).size() == 1);
    CHECK(psc_run({"--strict", "ingest", "--traces", (dir / "t.jsonl").string(), "--out", out}).code ==
          cli::kExitFailure);
    util::write_atomic(dir / "ok.jsonl", good);
    CHECK(psc_run({"--strict", "ingest", "--traces", (dir / "ok.jsonl").string(), "--out", out}).code == cli::kExitOk);
}

TEST_CASE("fixed ingestion through an endpoint") {
    auto dir = scratch("ingest");
    inference::StubServer server;
    server.start();
    auto r = psc_run({"ingest", "--corpus", (kData / "golden").string(), "--endpoint", server.url(), "--mode", "fixed",
                      "--out", (dir / "t.jsonl").string()});
    CHECK(r.code == cli::kExitOk);
    auto traces = inference::read_traces(dir / "t.jsonl");
    CHECK(traces.size() == 50);
    for (const auto& t : traces) CHECK(t.source == util::read_file(kData / "golden" / (t.sample_id + ".py")));
}

TEST_CASE("transform writes variants and a manifest") {
    auto dir = scratch("transform");
    auto in = dir / "in";
    fs::create_directories(in);
    for (const char* s : {"s001", "s002", "s003"}) fs::copy_file(kData / "sect" / (std::string(s) + ".py"), in / (std::string(s) + ".py"));
    auto run = [&](const fs::path& out) {
        return psc_run({"--seed", "7", "transform", "--in", in.string(), "--out", out.string(), "--kind",
                        "RenameVariable1,Add2Equal", "--check", (kData / "sect" / "harness.json").string()});
    };
    REQUIRE(run(dir / "out").code == cli::kExitOk);
    auto manifest = nlohmann::json::parse(util::read_file(dir / "out" / "manifest.json"));
    CHECK(manifest["seed"] == 7);
    CHECK(manifest["selector"] == "all");
    REQUIRE(manifest["variants"].size() == 6);
    for (const auto& v : manifest["variants"]) {
        CHECK(fs::exists(dir / "out" / v["file"].get<std::string>()));
        CHECK(v["equivalent"] == true);
        CHECK(v["file"].get<std::string>() ==
              v["sample_id"].get<std::string>() + "." + v["kind"].get<std::string>() + ".py");
    }
    REQUIRE(run(dir / "again").code == cli::kExitOk);
    CHECK(util::read_file(dir / "out" / "manifest.json") == util::read_file(dir / "again" / "manifest.json"));
}

TEST_CASE("report is reproducible") {
    auto dir = scratch("report");
    util::write_atomic(dir / "ig.csv", "rule_id,metric,ig_bits,h_s_bits,n\nW0611,psc_mean,0.25,1,40\nW0611,bleu,0.5,1,40\n");
    util::write_atomic(dir / "paired.csv",
                       "sample_id,rule_id,condition,psc_median,propense\n"
                       "a,W0611,baseline,0.8,true\na,W0611,treatment,0.6,true\n"
                       "b,W0611,baseline,0.7,true\nb,W0611,treatment,0.4,false\n");
    auto make = [&](const std::string& tag) {
        auto r = psc_run({"report", "--ig", (dir / "ig.csv").string(), "--mitigation", (dir / "paired.csv").string(),
                          "--out", (dir / (tag + ".md")).string(), "--plot-dir", (dir / tag).string()});
        REQUIRE(r.code == cli::kExitOk);
        return util::read_file(dir / (tag + ".md"));
    };
    auto first = make("one");
    CHECK(first.rfind("# PSC report", 0) == 0);
    CHECK(first == make("two"));
    CHECK(util::read_file(dir / "one" / "ig_W0611.svg") == util::read_file(dir / "two" / "ig_W0611.svg"));
    CHECK(util::read_file(dir / "one" / "mitigation_W0611.svg") ==
          util::read_file(dir / "two" / "mitigation_W0611.svg"));
}

TEST_CASE("corpus filter") {
    std::vector<cli::CorpusEntry> corpus;
    std::size_t index = 0;
    auto add = [&](const std::string& rule, int n, std::size_t tokens) {
        for (int k = 0; k < n; ++k) corpus.push_back({rule + std::to_string(k), rule, tokens, index++});
    };
    add("A", 600, 100);
    add("B", 499, 100);
    add("C", 500, 100);
    add("C", 3, 701);
    cli::CorpusFilter filter;
    filter.seed = 1;
    auto kept = cli::filter_corpus(corpus, filter);
    std::map<std::string, int> per;
    for (const auto& e : kept) {
        ++per[e.rule_id];
        CHECK(e.token_count <= 700);
    }
    CHECK(per["A"] == 500);
    CHECK(per.count("B") == 0);
    CHECK(per["C"] == 500);
    CHECK(std::is_sorted(kept.begin(), kept.end(), [](const auto& a, const auto& b) { return a.index < b.index; }));

    auto ids = [](const std::vector<cli::CorpusEntry>& v) {
        std::vector<std::string> out;
        for (const auto& e : v) out.push_back(e.sample_id);
        return out;
    };
    CHECK(ids(cli::filter_corpus(corpus, filter)) == ids(kept));
    filter.seed = 2;
    CHECK(ids(cli::filter_corpus(corpus, filter)) != ids(kept));

    filter.per_rule_cap = 0;
    CHECK_THROWS(filter.validate());
}
