#pragma once

#include <chrono>
#include <string>
#include <utility>
#include <vector>

namespace psc::sect {

/// One call made against both versions of a snippet. Arguments are Python
/// expressions evaluated afresh for each version.
struct CallSpec {
    std::string function;
    std::vector<std::string> args;
    std::vector<std::pair<std::string, std::string>> kwargs;
};

struct EquivalenceCase {
    std::string original;
    std::string transformed;
    std::vector<CallSpec> calls;
};

struct EquivalenceResult {
    bool equivalent = true;
    std::vector<std::string> differences;  // one line per diverging call
};

struct HarnessOptions {
    std::string python = "python3";
    std::chrono::milliseconds timeout{60000};  // whole batch
    double call_timeout_seconds = 2.0;
};

/// Runs every call against both versions and compares return values (== then
/// repr), raised exception types, captured stdout and the arguments' state
/// after the call. Throws HarnessError when a called function is not a
/// top-level def, an arity does not fit, or the interpreter fails.
EquivalenceResult check_equivalence(const EquivalenceCase& c, const HarnessOptions& options = {});

/// Same as check_equivalence over many cases in a single interpreter.
std::vector<EquivalenceResult> check_equivalence(const std::vector<EquivalenceCase>& cases,
                                                 const HarnessOptions& options = {});

/// Reads {"calls": {"<sample_id>": [{"function", "args", "kwargs"}...]}}.
std::vector<std::pair<std::string, std::vector<CallSpec>>> parse_call_specs(const std::string& json_text);

}  // namespace psc::sect
