#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "psc/python/ast.hpp"

namespace psc::sect {

enum class TransformKind { Add2Equal, SwitchEqualExp, InfixDividing, SwitchRelation, RenameVariable1, RenameVariable2 };

inline constexpr TransformKind kAllKinds[] = {TransformKind::Add2Equal,       TransformKind::SwitchEqualExp,
                                              TransformKind::InfixDividing,   TransformKind::SwitchRelation,
                                              TransformKind::RenameVariable1, TransformKind::RenameVariable2};

std::string_view to_string(TransformKind k) noexcept;
std::optional<TransformKind> parse_kind(std::string_view name) noexcept;

enum class SiteSelector { all, first, seeded_random };

std::string_view to_string(SiteSelector s) noexcept;
std::optional<SiteSelector> parse_selector(std::string_view name) noexcept;

/// Ranges of the input that were rewritten.
struct Transformation {
    TransformKind kind{};
    std::vector<python::ByteRange> applied_sites;
};

struct TransformResult {
    std::string output;
    Transformation record;
};

/// Source of replacement names for RenameVariable2.
class SubstituteProvider {
public:
    virtual ~SubstituteProvider() = default;
    /// Candidate replacements for `name`, best first. `snippet` is context.
    virtual std::vector<std::string> substitutes(const std::string& name, std::string_view snippet) const = 0;
};

/// Embedded table (number -> myNumber, ...) with a "my" + CamelCase fallback.
class TableSubstituteProvider : public SubstituteProvider {
public:
    std::vector<std::string> substitutes(const std::string& name, std::string_view snippet) const override;
};

/// Queries POST {base_url}/substitute with {"name", "context"} and reads
/// {"substitutes": [...]}; falls back to the table provider on failure.
class HttpSubstituteProvider : public SubstituteProvider {
public:
    explicit HttpSubstituteProvider(std::string base_url, int timeout_seconds = 10);
    std::vector<std::string> substitutes(const std::string& name, std::string_view snippet) const override;

private:
    std::string base_url_;
    int timeout_seconds_;
    TableSubstituteProvider fallback_;
};

struct TransformOptions {
    SiteSelector selector = SiteSelector::all;
    std::uint64_t seed = 0;
    const SubstituteProvider* provider = nullptr;  // RenameVariable2; table provider when null
};

/// Applies one statement-level transformation.
///
/// Untouched bytes are preserved exactly. When no site exists the output
/// equals the input and applied_sites is empty. Throws ParseError when the
/// snippet does not parse and RenameCollisionError when a selected rename
/// target name is already in use (sites are skipped instead under `all`).
TransformResult transform(std::string_view snippet, TransformKind kind, const TransformOptions& options = {});

}  // namespace psc::sect
