#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "psc/errors.hpp"
#include "psc/inference/stub_server.hpp"
#include "psc/mitigation/mitigation.hpp"
#include "psc/util/csv.hpp"
#include "psc/util/io.hpp"

using namespace psc;
using namespace psc::mitigation;

namespace {

const std::filesystem::path kCorpus = std::filesystem::path(PSC_TEST_DATA_DIR) / "corpus" / "mitigation";

std::vector<MitigationSample> load_corpus(std::vector<std::string>& documents) {
    std::vector<MitigationSample> out;
    for (const auto& row : util::read_csv(kCorpus / "manifest.csv").rows) {
        out.push_back({row[0], row[1], util::read_file(kCorpus / (row[0] + ".py"))});
        documents.push_back(out.back().source);
    }
    return out;
}

MitigationResult run_with(double baseline_p, double treatment_p) {
    std::vector<std::string> docs;
    auto corpus = load_corpus(docs);
    inference::StubOptions o;
    o.documents = docs;
    o.completion_logprob = std::log(baseline_p);
    o.instructed_completion_logprob = std::log(treatment_p);
    inference::StubServer server(o);
    server.start();
    inference::EndpointConfig e;
    e.base_url = server.url();
    e.model = "stub";
    e.api_key = "k";
    inference::CompletionClient client(e);
    MitigationOptions opts;
    opts.max_concurrent = 3;
    return run_mitigation(corpus, opts, client);
}

}  // namespace

TEST_CASE("prompt rendering") {
    auto p0 = render(PromptTemplate::builtin(PromptId::p0_minimal), "x = 1\n");
    CHECK(p0.find("x = 1\n") != std::string::npos);
    CHECK(p0.find("{snippet}") == std::string::npos);
    auto p1 = render(PromptTemplate::builtin(PromptId::p1_generic), "x = 1\n");
    CHECK(p1 != p0);
    auto p3 = render(PromptTemplate::builtin(PromptId::p3_structured), "x = 1\n");
    for (const char* rule : {"W0719", "C0304", "W0611"}) CHECK(p3.find(rule) != std::string::npos);
    CHECK(p3.find("code smells") != std::string::npos);
    auto custom = render(PromptTemplate::builtin(PromptId::p3_structured, std::vector<std::string>{"R1705"}), "y\n");
    CHECK(custom.find("R1705") != std::string::npos);
    CHECK(custom.find("W0719") == std::string::npos);
    CHECK_THROWS_AS(render(PromptTemplate::builtin(PromptId::p0_minimal), ""), PreconditionError);
    PromptTemplate twice{PromptId::p1_generic, "{snippet}{snippet}", {}};
    CHECK_THROWS_AS(twice.validate(), ConfigError);
    for (auto id : {PromptId::p0_minimal, PromptId::p1_generic, PromptId::p2_role, PromptId::p3_structured})
        CHECK(parse_prompt_id(to_string(id)) == id);
}

TEST_CASE("quantiles and boxes") {
    CHECK(quantile({1, 2, 3, 4}, 0.5) == doctest::Approx(2.5));
    CHECK(quantile({1, 2, 3, 4}, 0.25) == doctest::Approx(1.75));
    CHECK(quantile({7}, 0.9) == 7);
    auto b = box_stats({1, 2, 3, 4, 5, 6, 7, 8, 100});
    CHECK(b.n == 9);
    CHECK(b.median == 5);
    CHECK(b.q1 == 3);
    CHECK(b.q3 == 7);
    CHECK(b.whisker_low == 1);
    CHECK(b.whisker_high == 8);
    CHECK(b.outliers == std::vector<double>{100});
}

TEST_CASE("summaries and csv") {
    std::vector<PairedRow> rows;
    for (int i = 0; i < 6; ++i) {
        double base = 0.5 + 0.05 * i, treat = 0.3 + 0.05 * i;
        rows.push_back({"s" + std::to_string(i), "W0611", Condition::baseline, base, base >= 0.5});
        rows.push_back({"s" + std::to_string(i), "W0611", Condition::treatment, treat, treat >= 0.5});
    }
    auto summary = summarize(rows);
    REQUIRE(summary.size() == 2);
    for (const auto& s : summary) {
        double below = 0;
        for (const auto& r : rows) below += r.condition == s.condition && r.psc_median < 0.5;
        CHECK(s.fraction_below_lambda == doctest::Approx(below / 6));
    }
    auto gaps = median_gaps(summary);
    REQUIRE(gaps.size() == 1);
    CHECK(gaps[0].second == doctest::Approx(0.2));

    auto text = paired_csv(rows);
    CHECK(text.rfind("sample_id,rule_id,condition,psc_median,propense\n", 0) == 0);
    auto back = parse_paired_csv(text);
    REQUIRE(back.size() == rows.size());
    CHECK(back[3].psc_median == rows[3].psc_median);
    CHECK(back[3].condition == rows[3].condition);
    CHECK(back[3].propense == rows[3].propense);
    CHECK_THROWS(parse_paired_csv("sample_id,rule_id,condition,psc_median,propense\ns,W0611,middle,0.5,true\n"));
    CHECK_THROWS(parse_paired_csv("sample_id,rule_id\n"));

    auto svg = boxplot_svg("W0611", summary[0].stats, summary[1].stats);
    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(svg.find("</svg>") != std::string::npos);
    CHECK(svg.find("W0611") != std::string::npos);
}

TEST_CASE("identical prompts give no gap") {
    auto r = run_with(0.8, 0.8);
    CHECK(r.incomplete.empty());
    REQUIRE(r.rows.size() % 2 == 0);
    for (std::size_t i = 0; i < r.rows.size(); i += 2) {
        CHECK(r.rows[i].condition == Condition::baseline);
        CHECK(r.rows[i + 1].condition == Condition::treatment);
        CHECK(r.rows[i].sample_id == r.rows[i + 1].sample_id);
    }
    for (const auto& [rule, gap] : median_gaps(summarize(r.rows))) CHECK(gap == doctest::Approx(0).epsilon(1e-12));
}

TEST_CASE("a less confident treatment lowers the median") {
    auto r = run_with(0.8, 0.4);
    CHECK(r.incomplete.empty());
    auto gaps = median_gaps(summarize(r.rows));
    CHECK_FALSE(gaps.empty());
    for (const auto& [rule, gap] : gaps) CHECK(gap > 0.3);
}
