#pragma once

#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "psc/core/types.hpp"

namespace psc::smells {

struct RuleInfo {
    std::string_view id;
    std::string_view symbol;
};

/// Rules implemented by the native engine, ordered by id.
const std::vector<RuleInfo>& implemented_rules();

/// Symbol for a rule id, or an empty view when unknown.
std::string_view symbol_of(std::string_view rule_id) noexcept;

/// Rule id reported when a snippet does not parse.
inline constexpr std::string_view kSyntaxErrorRule = "E0001";

struct RuleSet {
    std::set<std::string> rules;
    int max_line_length = 100;

    /// Every implemented rule enabled.
    static RuleSet all();
    /// Only the listed rules; throws PreconditionError on an unimplemented id.
    static RuleSet of(const std::vector<std::string>& ids);

    bool enabled(std::string_view id) const { return rules.count(std::string(id)) > 0; }
};

/// Runs the enabled checks over `snippet`.
///
/// Results are ordered by (start_line, start_col, rule_id). A snippet that does
/// not parse yields a single E0001 syntax-error diagnostic at the error position.
std::vector<SmellDiagnostic> detect(std::string_view snippet, const RuleSet& rules = RuleSet::all(),
                                    const std::string& sample_id = "");

}  // namespace psc::smells
