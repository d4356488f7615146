#include <doctest.h>

#include "psc/errors.hpp"
#include "psc/sect/equivalence.hpp"
#include "psc/sect/transform.hpp"

using namespace psc;
using namespace psc::sect;

TEST_CASE("identity is equivalent") {
    std::string src = "def f(a, b=2):\n    return a * b\n";
    auto r = check_equivalence({src, src, {{"f", {"3"}, {}}, {"f", {"3"}, {{"b", "5"}}}}});
    CHECK(r.equivalent);
    CHECK(r.differences.empty());
}

TEST_CASE("augmented assignment rewrite keeps results") {
    std::string src = "def f(a):\n    a += 9\n    return a\n";
    auto out = transform(src, TransformKind::Add2Equal).output;
    CHECK(out == "def f(a):\n    a = a + 9\n    return a\n");
    CHECK(check_equivalence({src, out, {{"f", {"1"}, {}}}}).equivalent);
}

TEST_CASE("a mutated constant is caught") {
    auto r = check_equivalence({"def f(a):\n    return a + 9\n", "def f(a):\n    return a + 8\n", {{"f", {"1"}, {}}}});
    CHECK_FALSE(r.equivalent);
    CHECK(r.differences.size() == 1);
}

TEST_CASE("exceptions, output and argument state are compared") {
    CHECK(check_equivalence({"def f(x):\n    return 1 / x\n", "def f(x):\n    return 1 / x\n", {{"f", {"0"}, {}}}})
              .equivalent);
    CHECK_FALSE(check_equivalence({"def f(x):\n    return 1 / x\n", "def f(x):\n    return int('z')\n",
                                   {{"f", {"0"}, {}}}})
                    .equivalent);
    CHECK_FALSE(check_equivalence({"def f():\n    print(1)\n", "def f():\n    print(2)\n", {{"f", {}, {}}}}).equivalent);
    CHECK_FALSE(check_equivalence({"def f(l):\n    l.append(1)\n", "def f(l):\n    l.append(2)\n", {{"f", {"[]"}, {}}}})
                    .equivalent);
    CHECK(check_equivalence({"def f(l):\n    l += [1]\n", "def f(l):\n    l.extend([1])\n", {{"f", {"[]"}, {}}}})
              .equivalent);
}

TEST_CASE("harness errors") {
    CHECK_THROWS_AS(check_equivalence({"x = 1\n", "x = 1\n", {{"f", {}, {}}}}), HarnessError);
    CHECK_THROWS_AS(check_equivalence({"def f(a):\n    pass\n", "def f(a):\n    pass\n", {{"f", {"1", "2"}, {}}}}),
                    HarnessError);
}

TEST_CASE("batch and call spec parsing") {
    auto specs = parse_call_specs(R"({"calls": {"s1": [{"function": "f", "args": ["1"], "kwargs": {"b": "2"}}]}})");
    REQUIRE(specs.size() == 1);
    CHECK(specs[0].first == "s1");
    REQUIRE(specs[0].second.size() == 1);
    CHECK(specs[0].second[0].kwargs == std::vector<std::pair<std::string, std::string>>{{"b", "2"}});
    CHECK_THROWS_AS(parse_call_specs("{}"), SchemaError);

    std::string src = "def f(a, b=0):\n    return a - b\n";
    auto results = check_equivalence(std::vector<EquivalenceCase>{
        {src, src, specs[0].second}, {src, "def f(a, b=0):\n    return b - a\n", specs[0].second}});
    REQUIRE(results.size() == 2);
    CHECK(results[0].equivalent);
    CHECK_FALSE(results[1].equivalent);
}
