#include <benchmark/benchmark.h>

#include <filesystem>
#include <random>

#include "psc/align/align.hpp"
#include "psc/inference/stub_server.hpp"
#include "psc/infogain/infogain.hpp"
#include "psc/python/lexer.hpp"
#include "psc/python/parser.hpp"
#include "psc/score/psc.hpp"
#include "psc/sect/transform.hpp"
#include "psc/smells/detect.hpp"
#include "psc/util/io.hpp"

namespace fs = std::filesystem;
using namespace psc;

namespace {

std::vector<std::string> load(const std::string& corpus) {
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(fs::path(PSC_BENCH_DATA_DIR) / "corpus" / corpus))
        if (e.path().extension() == ".py") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    std::vector<std::string> out;
    for (const auto& f : files) out.push_back(util::read_file(f));
    return out;
}

const std::vector<std::string>& snippets() {
    static const auto all = load("sect");
    return all;
}

const std::vector<std::string>& smelly() {
    static const auto all = load("golden");
    return all;
}

TokenTrace trace_of(const std::string& source) {
    TokenTrace t;
    t.sample_id = "b";
    t.source = source;
    std::size_t at = 0;
    for (const auto& tok : inference::stub_tokenize(source)) {
        t.tokens.push_back({tok, at, at + tok.size(), inference::stub_logprob(tok)});
        at += tok.size();
    }
    return t;
}

std::size_t corpus_bytes() {
    std::size_t n = 0;
    for (const auto& s : snippets()) n += s.size();
    return n;
}

void BM_Tokenize(benchmark::State& state) {
    for (auto _ : state)
        for (const auto& s : snippets()) benchmark::DoNotOptimize(python::tokenize(s));
    state.SetBytesProcessed(static_cast<int64_t>(state.iterations() * corpus_bytes()));
}
BENCHMARK(BM_Tokenize);

void BM_Parse(benchmark::State& state) {
    for (auto _ : state)
        for (const auto& s : snippets()) benchmark::DoNotOptimize(python::parses(s));
    state.SetBytesProcessed(static_cast<int64_t>(state.iterations() * corpus_bytes()));
}
BENCHMARK(BM_Parse);

void BM_Detect(benchmark::State& state) {
    for (auto _ : state)
        for (const auto& s : snippets()) benchmark::DoNotOptimize(smells::detect(s));
    state.SetBytesProcessed(static_cast<int64_t>(state.iterations() * corpus_bytes()));
}
BENCHMARK(BM_Detect);

struct Batch {
    std::vector<TokenTrace> traces;
    std::vector<AlignedSmell> smells;
};

const Batch& batch() {
    static const Batch b = [] {
        Batch out;
        out.traces.reserve(smelly().size());
        for (const auto& s : smelly()) out.traces.push_back(trace_of(s));
        for (const auto& t : out.traces)
            for (auto& d : smells::detect(t.source))
                out.smells.push_back({&t, d, align(d, t)});
        return out;
    }();
    return b;
}

void BM_Align(benchmark::State& state) {
    const auto& b = batch();
    for (auto _ : state)
        for (const auto& s : b.smells) benchmark::DoNotOptimize(align(s.diag, *s.trace));
    state.SetItemsProcessed(static_cast<int64_t>(state.iterations() * b.smells.size()));
}
BENCHMARK(BM_Align);

void BM_ScoreBatch(benchmark::State& state) {
    const auto& b = batch();
    ScoreOptions o;
    o.scope = state.range(0) ? BoundsScope::global_batch : BoundsScope::per_smell_type_batch;
    for (auto _ : state) benchmark::DoNotOptimize(score_batch(b.smells, o));
    state.SetItemsProcessed(static_cast<int64_t>(state.iterations() * b.smells.size()));
}
BENCHMARK(BM_ScoreBatch)->Arg(0)->Arg(1);

void BM_Transform(benchmark::State& state) {
    auto kind = sect::kAllKinds[state.range(0)];
    state.SetLabel(std::string(sect::to_string(kind)));
    for (auto _ : state) {
        for (const auto& s : snippets()) {
            try {
                benchmark::DoNotOptimize(sect::transform(s, kind));
            } catch (const std::exception&) {
            }
        }
    }
}
BENCHMARK(BM_Transform)->DenseRange(0, 5);

void BM_InformationGain(benchmark::State& state) {
    std::mt19937_64 rng(42);
    std::normal_distribution<double> normal;
    std::vector<SeverityLabel> labels;
    std::vector<double> scores;
    for (int64_t i = 0; i < state.range(0); ++i) {
        double z = normal(rng);
        labels.push_back(z > 0 ? SeverityLabel::high : SeverityLabel::low);
        scores.push_back(z + normal(rng));
    }
    for (auto _ : state) benchmark::DoNotOptimize(infogain::information_gain(labels, scores));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_InformationGain)->Range(512, 1 << 16);

}  // namespace
BENCHMARK_MAIN();
