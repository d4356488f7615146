#include <doctest.h>

#include <filesystem>
#include <vector>

#include "psc/errors.hpp"
#include "psc/python/analysis.hpp"
#include "psc/python/lexer.hpp"
#include "psc/python/parser.hpp"
#include "psc/util/io.hpp"

using namespace psc;
using namespace psc::python;
namespace fs = std::filesystem;

namespace {

std::vector<std::string> corpus_sources() {
    std::vector<std::string> out;
    for (const char* sub : {"golden", "sect", "mitigation"}) {
        for (const auto& e : fs::directory_iterator(fs::path(PSC_TEST_DATA_DIR) / "corpus" / sub))
            if (e.path().extension() == ".py") out.push_back(util::read_file(e.path()));
    }
    return out;
}

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\\'; }

}  // namespace

TEST_CASE("tokens cover every non-whitespace byte exactly once") {
    for (const auto& src : corpus_sources()) {
        std::vector<int> owner(src.size(), 0);
        for (const auto& t : tokenize(src)) {
            REQUIRE(t.end <= src.size());
            CHECK(t.text == std::string_view(src).substr(t.begin, t.end - t.begin));
            if (t.kind == TokenKind::nl || t.kind == TokenKind::newline) continue;
            for (std::size_t b = t.begin; b < t.end; ++b) ++owner[b];
        }
        for (std::size_t b = 0; b < src.size(); ++b) {
            if (!is_space(src[b])) CHECK(owner[b] == 1);
        }
    }
}

TEST_CASE("every bundled snippet parses") {
    for (const auto& src : corpus_sources()) CHECK(parses(src));
}

TEST_CASE("syntax errors carry a position") {
    try {
        parse("def f(:\n    pass\n");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line() == 1);
    }
    CHECK_FALSE(parses("x = (1,\n"));
    CHECK_FALSE(parses("if x:\npass\n"));
    CHECK_FALSE(parses("s = 'abc\n"));
    CHECK_FALSE(parses("  x = 1\n"));
    CHECK(parses(""));
    CHECK(parses("x = [\n  1,\n  2,\n]\n"));
    CHECK(parses("async def f():\n    async with a as b:\n        await b\n"));
    CHECK(parses("f = lambda *a, k=1, **kw: (yield)\n"));
    CHECK_FALSE(parses("x = (1]\n"));
    CHECK(parses("def g():\n    x = yield from h()\n"));
    CHECK(parses("print(f'{a!r:>{w}}')\n"));
}

TEST_CASE("statement and expression structure") {
    auto tree = parse("x = a + b * c\nif x > 1:\n    y = -x\nelif x:\n    pass\n");
    const auto& root = tree.node(tree.root());
    REQUIRE(root.kind == NodeKind::Module);
    REQUIRE(root.children.size() == 2);
    const auto& assign = tree.node(root.children[0]);
    CHECK(assign.kind == NodeKind::Assign);
    const auto& value = tree.node(assign.children.back());
    CHECK(value.kind == NodeKind::BinOp);
    CHECK(value.value == "+");
    CHECK(tree.text(value.children[1]) == "b * c");
    const auto& branch = tree.node(root.children[1]);
    CHECK(branch.kind == NodeKind::If);
    CHECK(tree.text(branch.children[0]) == "x > 1");
    CHECK(tree.node(branch.children[2]).kind == NodeKind::If);
    CHECK((tree.node(branch.children[2]).flags & kElif) != 0);
    CHECK(statements(tree).size() == 5);
}

TEST_CASE("parenthesized ranges include the parentheses") {
    auto tree = parse("y = (a + b) * c\n");
    const auto& mul = tree.node(tree.node(tree.node(tree.root()).children[0]).children.back());
    CHECK(tree.text(mul.children[0]) == "(a + b)");
}

TEST_CASE("line index") {
    LineIndex li("ab\ncd\n");
    CHECK(li.line_count() == 2);
    CHECK(li.line_start(2) == 3);
    CHECK(li.line_end(1) == 3);
    CHECK(li.line_of(4) == 2);
    CHECK(li.col_of(4) == 1);
    CHECK(LineIndex("ab").line_count() == 1);
}

TEST_CASE("scope analysis") {
    auto tree = parse("import os\ndef f(a, *, b=1):\n    global g\n    c = a\n    g = 2\n    def h():\n        d = 1\n    return c\n");
    NodeId fn = tree.node(tree.root()).children[1];
    std::vector<std::string> names;
    for (const auto& b : scope_bindings(tree, fn)) names.push_back(b.name);
    CHECK(names == std::vector<std::string>{"a", "b", "c", "h"});
    CHECK(declared_outer(tree, fn) == std::set<std::string>{"g"});
    CHECK(params_of(tree, fn).size() == 2);
    CHECK(loaded_names(tree, fn).count("c") == 1);
    CHECK(identifiers(tree).count("os") == 1);
    CHECK(fstring_expressions("f'{a} and {b + 1:>3}'") == std::vector<std::string>{"a", "b + 1"});
}

TEST_CASE("keywords") {
    CHECK(is_keyword("lambda"));
    CHECK_FALSE(is_keyword("match"));
    CHECK(is_soft_keyword("match"));
    CHECK(is_builtin_name("len"));
    CHECK(is_fstring("rf'x'"));
    CHECK_FALSE(is_fstring("b'x'"));
}
