#include <doctest.h>

#include <random>

#include "psc/align/align.hpp"
#include "psc/errors.hpp"
#include "psc/python/lexer.hpp"
#include "psc/util/random.hpp"

using namespace psc;

namespace {

TokenTrace trace_of(const std::vector<std::string>& pieces) {
    TokenTrace t;
    t.sample_id = "s";
    for (const auto& p : pieces) {
        t.tokens.push_back({p, t.source.size(), t.source.size() + p.size(), -0.1});
        t.source += p;
    }
    return t;
}

SmellDiagnostic diag(const std::string& rule, int line, int col, std::optional<int> end_line = std::nullopt,
                     std::optional<int> end_col = std::nullopt) {
    SmellDiagnostic d;
    d.sample_id = "s";
    d.rule_id = rule;
    d.start_line = line;
    d.start_col = col;
    d.end_line = end_line;
    d.end_col = end_col;
    return d;
}

}  // namespace

TEST_CASE("exact range maps to the smallest cover") {
    auto t = trace_of({"im", "po", "rt", " os", "\n"});
    auto s = align(diag("W0611", 1, 0, 1, 6), t);
    CHECK(s == TokenSpan{0, 2, Coverage::exact});
}

TEST_CASE("file-tail rules take the final spanned token") {
    auto t = trace_of({"x", " =", " 1"});
    t.tokens.push_back({"", t.source.size(), t.source.size(), -0.5});
    CHECK(align(diag("C0304", 1, 0), t) == TokenSpan{2, 2, Coverage::file_tail});
    CHECK(align(diag("C0305", 1, 0), t).coverage == Coverage::file_tail);
}

TEST_CASE("column-less diagnostics cover the whole line") {
    auto t = trace_of({"a", " =", " 1", "\n", "b", " =", " 2", "\n"});
    CHECK(align(diag("C0303", 2, 0), t) == TokenSpan{4, 7, Coverage::line});
}

TEST_CASE("tokens crossing the range boundary are included whole") {
    auto t = trace_of({"abc", "def"});
    CHECK(align(diag("X", 1, 2, 1, 4), t) == TokenSpan{0, 1, Coverage::exact});
}

TEST_CASE("unalignable and mismatched inputs") {
    auto t = trace_of({"x", "\n"});
    CHECK_THROWS_AS(align(diag("W0611", 5, 0), t), UnalignableError);
    auto other = diag("W0611", 1, 0);
    other.sample_id = "other";
    CHECK_THROWS_AS(align(other, t), PreconditionError);
    TokenTrace empty;
    CHECK_THROWS_AS(align(diag("C0304", 1, 0), empty), UnalignableError);
}

TEST_CASE("generated segment") {
    TokenTrace t = trace_of({std::string(10, 'a'), std::string(30, 'b'), std::string(10, 'c')});
    t.generated_from = 30;
    CHECK(in_generated_segment({2, 2}, t));
    CHECK_FALSE(in_generated_segment({0, 2}, t));
    t.generated_from.reset();
    CHECK_THROWS_AS(in_generated_segment({2, 2}, t), MissingSegmentError);
}

TEST_CASE("exact spans are minimal on random traces") {
    std::mt19937_64 rng(util::derive_seed(5, "align"));
    const char* pieces[] = {"a", "bc", " ", "\n", "def", "(", ")", "  ", "xyz", ":"};
    for (int round = 0; round < 300; ++round) {
        std::vector<std::string> p;
        for (std::size_t n = 1 + util::uniform_below(rng, 25); n > 0; --n) p.push_back(pieces[util::uniform_below(rng, 10)]);
        auto t = trace_of(p);
        python::LineIndex li(t.source);
        int line = 1 + static_cast<int>(util::uniform_below(rng, li.line_count()));
        std::size_t len = li.line_end(line) - li.line_start(line);
        int c0 = static_cast<int>(util::uniform_below(rng, len + 1));
        int c1 = c0 + static_cast<int>(util::uniform_below(rng, len + 1 - c0));
        auto d = diag("X", line, c0, line, c1);
        TokenSpan s;
        try {
            s = align(d, t);
        } catch (const UnalignableError&) {
            continue;
        }
        auto bytes = diagnostic_bytes(d, t.source);
        auto meets = [&](std::size_t k) { return t.tokens[k].byte_end > bytes.begin && t.tokens[k].byte_start < bytes.end; };
        CHECK(meets(s.i));
        CHECK(meets(s.j));
        for (std::size_t k = 0; k < t.size(); ++k)
            if (meets(k)) CHECK((k >= s.i && k <= s.j));
    }
}
