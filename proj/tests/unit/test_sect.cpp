#include <doctest.h>

#include <filesystem>
#include <set>

#include "psc/errors.hpp"
#include "psc/python/analysis.hpp"
#include "psc/python/parser.hpp"
#include "psc/sect/transform.hpp"
#include "psc/util/io.hpp"

using namespace psc;
using namespace psc::sect;
namespace fs = std::filesystem;

namespace {

std::string rewrite(std::string_view src, TransformKind k, SiteSelector sel = SiteSelector::all, std::uint64_t seed = 0) {
    TransformOptions o;
    o.selector = sel;
    o.seed = seed;
    return transform(src, k, o).output;
}

std::string squash(const std::string& s) {
    std::string o;
    for (char c : s)
        if (c != ' ') o += c;
    return o;
}

// Names read somewhere but bound nowhere in the snippet.
std::set<std::string> free_names(const std::string& src) {
    auto tree = python::parse(src);
    std::set<std::string> bound, out;
    tree.walk(tree.root(), [&](python::NodeId id) {
        const auto& n = tree.node(id);
        if (n.kind == python::NodeKind::Name && python::name_context(tree, id) != python::NameContext::load)
            bound.insert(n.value);
        if (n.kind == python::NodeKind::Param || n.kind == python::NodeKind::FunctionDef ||
            n.kind == python::NodeKind::ClassDef)
            bound.insert(n.value);
        if (n.kind == python::NodeKind::Alias) bound.insert(n.alt.empty() ? n.value.substr(0, n.value.find('.')) : n.alt);
        return true;
    });
    for (const auto& name : python::loaded_names(tree, tree.root()))
        if (!bound.count(name)) out.insert(name);
    return out;
}

std::vector<std::string> corpus() {
    std::vector<std::string> out;
    for (const auto& e : fs::directory_iterator(fs::path(PSC_TEST_DATA_DIR) / "corpus" / "sect"))
        if (e.path().extension() == ".py") out.push_back(util::read_file(e.path()));
    return out;
}

}  // namespace

TEST_CASE("worked examples") {
    CHECK(rewrite("a += 9", TransformKind::Add2Equal) == "a = a + 9");
    CHECK(rewrite("a == b", TransformKind::SwitchEqualExp) == "b == a");
    CHECK(rewrite("x = a + b * c", TransformKind::InfixDividing) == "temp = b * c\nx = a + temp");
    CHECK(rewrite("a > b", TransformKind::SwitchRelation) == "b < a");
    CHECK(rewrite("number = 1", TransformKind::RenameVariable1) == "n = 1");
    CHECK(rewrite("number = 1", TransformKind::RenameVariable2) == "myNumber = 1");
}

TEST_CASE("rewrites keep surrounding bytes") {
    CHECK(rewrite("def f(a):\n    a -= b * 2  # c\n    return a\n", TransformKind::Add2Equal) ==
          "def f(a):\n    a = a - b * 2  # c\n    return a\n");
    CHECK(rewrite("a += b or c", TransformKind::Add2Equal) == "a = a + (b or c)");
    CHECK(rewrite("a -= b - c", TransformKind::Add2Equal) == "a = a - (b - c)");
    CHECK(rewrite("if x <= f(y):\n    pass\n", TransformKind::SwitchRelation) == "if f(y) >= x:\n    pass\n");
    CHECK(rewrite("ok = a != b", TransformKind::SwitchEqualExp) == "ok = b != a");
    CHECK(rewrite("a *= 2", TransformKind::Add2Equal) == "a *= 2");
}

TEST_CASE("fresh temporaries avoid existing names") {
    CHECK(rewrite("temp = 1\nx = a + b * c", TransformKind::InfixDividing) ==
          "temp = 1\ntemp_2 = b * c\nx = a + temp_2");
    CHECK(rewrite("def f(a, b, c):\n    return a + b * c\n", TransformKind::InfixDividing) ==
          "def f(a, b, c):\n    temp = b * c\n    return a + temp\n");
}

TEST_CASE("no site leaves the input untouched") {
    for (auto k : kAllKinds) {
        TransformOptions o;
        auto r = transform("pass\n", k, o);
        CHECK(r.output == "pass\n");
        CHECK(r.record.applied_sites.empty());
        CHECK((r.record.kind == k));
    }
}

TEST_CASE("selectors") {
    std::string src = "a += 1\nb += 2\nc += 3\n";
    CHECK(rewrite(src, TransformKind::Add2Equal) == "a = a + 1\nb = b + 2\nc = c + 3\n");
    CHECK(rewrite(src, TransformKind::Add2Equal, SiteSelector::first) == "a = a + 1\nb += 2\nc += 3\n");
    auto r1 = rewrite(src, TransformKind::Add2Equal, SiteSelector::seeded_random, 42);
    CHECK(r1 == rewrite(src, TransformKind::Add2Equal, SiteSelector::seeded_random, 42));
    TransformOptions o;
    o.selector = SiteSelector::seeded_random;
    CHECK(transform(src, TransformKind::Add2Equal, o).record.applied_sites.size() == 1);
    CHECK((parse_selector("first") == SiteSelector::first));
    CHECK_FALSE(parse_selector("some"));
    CHECK((parse_kind("RenameVariable-1") == TransformKind::RenameVariable1));
    CHECK((parse_kind("Add2Equal") == TransformKind::Add2Equal));
}

TEST_CASE("rename respects scopes and collisions") {
    CHECK(rewrite("def f(x):\n    number = x\n    return number\n", TransformKind::RenameVariable1) ==
          "def f(x):\n    n = x\n    return n\n");
    CHECK(rewrite("def f(number):\n    return number\n", TransformKind::RenameVariable1) ==
          "def f(number):\n    return number\n");
    CHECK(rewrite("number = 1\nn = 2\n", TransformKind::RenameVariable1) == "number = 1\nn = 2\n");
    CHECK_THROWS_AS(rewrite("number = 1\nn = 2\n", TransformKind::RenameVariable1, SiteSelector::first),
                    RenameCollisionError);
    CHECK(rewrite("def f():\n    value = 1\n    return eval('value')\n", TransformKind::RenameVariable1) ==
          "def f():\n    value = 1\n    return eval('value')\n");
    CHECK(rewrite("__all__ = []\n", TransformKind::RenameVariable2) == "__all__ = []\n");
}

TEST_CASE("errors") {
    CHECK_THROWS_AS(transform("def f(:\n", TransformKind::Add2Equal), ParseError);
}

TEST_CASE("table provider") {
    TableSubstituteProvider p;
    CHECK(p.substitutes("number", "").front() == "myNumber");
    CHECK(p.substitutes("i", "").front() == "index");
    CHECK(p.substitutes("foo_bar", "").front() == "myFooBar");
}

TEST_CASE("corpus properties") {
    for (const auto& src : corpus()) {
        for (auto k : kAllKinds) {
            TransformResult r;
            try {
                r = transform(src, k);
            } catch (const RenameCollisionError&) {
                continue;
            }
            CHECK(python::parses(r.output));
            if (r.record.applied_sites.empty()) CHECK(r.output == src);
            if (k == TransformKind::RenameVariable1 || k == TransformKind::RenameVariable2)
                CHECK(free_names(r.output) == free_names(src));
            if (k == TransformKind::SwitchEqualExp || k == TransformKind::SwitchRelation)
                CHECK(squash(transform(r.output, k).output) == squash(src));
        }
    }
}
