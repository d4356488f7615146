#include "psc/sect/equivalence.hpp"

#include <json.hpp>

#include "psc/errors.hpp"
#include "psc/python/analysis.hpp"
#include "psc/python/parser.hpp"
#include "psc/util/process.hpp"

namespace psc::sect {

namespace {

constexpr const char* kDriver = R"PY(
import contextlib, io, json, signal, sys

def _alarm(signum, frame):
    raise TimeoutError("call timed out")

signal.signal(signal.SIGALRM, _alarm)
req = json.load(sys.stdin)
limit = req["call_timeout"]

def _state(values):
    try:
        return repr(values)
    except Exception as exc:
        return "<unrepresentable %s>" % type(exc).__name__

def run(src, call):
    ns = {"__name__": "snippet"}
    buf = io.StringIO()
    try:
        with contextlib.redirect_stdout(buf):
            exec(compile(src, "<snippet>", "exec"), ns)
            args = [eval(a, {}) for a in call["args"]]
            kwargs = {k: eval(v, {}) for k, v in call["kwargs"]}
            signal.setitimer(signal.ITIMER_REAL, limit)
            try:
                value = ns[call["function"]](*args, **kwargs)
            finally:
                signal.setitimer(signal.ITIMER_REAL, 0)
        return ("ok", value, buf.getvalue(), _state((args, kwargs)))
    except BaseException as exc:
        signal.setitimer(signal.ITIMER_REAL, 0)
        return ("raise", type(exc).__name__, buf.getvalue(), "")

def same_value(a, b):
    try:
        if a == b and type(a) is type(b):
            return True
    except Exception:
        pass
    try:
        return repr(a) == repr(b)
    except Exception:
        return False

out = []
for case in req["cases"]:
    diffs = []
    for call in case["calls"]:
        a = run(case["original"], call)
        b = run(case["transformed"], call)
        label = "%s(%s)" % (call["function"], ", ".join(call["args"] + ["%s=%s" % tuple(kv) for kv in call["kwargs"]]))
        if a[0] != b[0]:
            diffs.append("%s: %s vs %s" % (label, a[0], b[0]))
        elif a[0] == "raise" and a[1] != b[1]:
            diffs.append("%s: raised %s vs %s" % (label, a[1], b[1]))
        elif a[0] == "ok" and not same_value(a[1], b[1]):
            diffs.append("%s: returned %r vs %r" % (label, a[1], b[1]))
        elif a[2] != b[2]:
            diffs.append("%s: stdout differs" % label)
        elif a[3] != b[3]:
            diffs.append("%s: argument state differs" % label)
    out.append(diffs)
json.dump(out, sys.stdout)
)PY";

void check_calls(const std::string& source, const std::vector<CallSpec>& calls) {
    using namespace psc::python;
    Tree tree = parse(source);
    for (const auto& call : calls) {
        NodeId def = kNoNode;
        for (NodeId s : tree.node(tree.root()).children) {
            if (tree.node(s).kind == NodeKind::FunctionDef && tree.node(s).value == call.function) def = s;
        }
        if (def == kNoNode) throw HarnessError("no top-level function '" + call.function + "'");
        std::size_t positional = 0;
        std::size_t required = 0;
        bool varargs = false;
        bool varkw = false;
        for (NodeId p : params_of(tree, def)) {
            const Node& pn = tree.node(p);
            auto k = param_kind(pn);
            if (k == ParamKind::positional) {
                ++positional;
                if (pn.children.size() < 2 || pn.children[1] == kNoNode) ++required;
            }
            varargs = varargs || k == ParamKind::var_args;
            varkw = varkw || k == ParamKind::var_kwargs;
        }
        std::size_t given = call.args.size() + (varkw ? 0 : call.kwargs.size());
        if ((!varargs && call.args.size() > positional) || (given < required && call.kwargs.empty())) {
            throw HarnessError("arity mismatch calling '" + call.function + "'");
        }
    }
}

}  // namespace

std::vector<EquivalenceResult> check_equivalence(const std::vector<EquivalenceCase>& cases,
                                                 const HarnessOptions& options) {
    nlohmann::json req;
    req["call_timeout"] = options.call_timeout_seconds;
    req["cases"] = nlohmann::json::array();
    for (const auto& c : cases) {
        check_calls(c.original, c.calls);
        nlohmann::json calls = nlohmann::json::array();
        for (const auto& call : c.calls) {
            nlohmann::json kw = nlohmann::json::array();
            for (const auto& [k, v] : call.kwargs) kw.push_back({k, v});
            calls.push_back({{"function", call.function}, {"args", call.args}, {"kwargs", kw}});
        }
        req["cases"].push_back({{"original", c.original}, {"transformed", c.transformed}, {"calls", calls}});
    }
    auto res = util::run_process({options.python, "-c", kDriver}, req.dump(), options.timeout);
    if (res.timed_out) throw HarnessError("equivalence harness timed out");
    if (res.exit_code != 0) throw HarnessError("equivalence harness failed: " + res.err);
    nlohmann::json out;
    try {
        out = nlohmann::json::parse(res.out);
    } catch (const nlohmann::json::exception& e) {
        throw HarnessError(std::string("unreadable harness output: ") + e.what());
    }
    std::vector<EquivalenceResult> results;
    for (const auto& diffs : out) {
        EquivalenceResult r;
        for (const auto& d : diffs) r.differences.push_back(d.get<std::string>());
        r.equivalent = r.differences.empty();
        results.push_back(std::move(r));
    }
    if (results.size() != cases.size()) throw HarnessError("harness returned a wrong number of results");
    return results;
}

EquivalenceResult check_equivalence(const EquivalenceCase& c, const HarnessOptions& options) {
    return check_equivalence(std::vector<EquivalenceCase>{c}, options).front();
}

std::vector<std::pair<std::string, std::vector<CallSpec>>> parse_call_specs(const std::string& json_text) {
    std::vector<std::pair<std::string, std::vector<CallSpec>>> out;
    try {
        auto j = nlohmann::json::parse(json_text);
        for (const auto& [id, calls] : j.at("calls").items()) {
            std::vector<CallSpec> specs;
            for (const auto& c : calls) {
                CallSpec s;
                s.function = c.at("function").get<std::string>();
                if (c.contains("args")) s.args = c.at("args").get<std::vector<std::string>>();
                if (c.contains("kwargs")) {
                    for (const auto& [k, v] : c.at("kwargs").items()) s.kwargs.emplace_back(k, v.get<std::string>());
                }
                specs.push_back(std::move(s));
            }
            out.emplace_back(id, std::move(specs));
        }
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("call specs: ") + e.what());
    }
    return out;
}

}  // namespace psc::sect
