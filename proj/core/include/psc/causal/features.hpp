#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace psc::causal {

enum class PosTag { noun, proper_noun, verb, adjective, numeral, interjection };

inline constexpr std::array<PosTag, 6> kAllPosTags = {PosTag::noun,      PosTag::proper_noun, PosTag::verb,
                                                      PosTag::adjective, PosTag::numeral,     PosTag::interjection};

std::string_view to_string(PosTag t) noexcept;

using PosCounts = std::map<PosTag, int>;

/// Syntactic and lexical confounders of one snippet.
struct FeatureVector {
    int loc = 0;
    int token_count = 0;
    int ast_nodes = 0;
    int identifiers = 0;
    int ast_height = 0;
    int syntax_errors = 0;
    int whitespace_count = 0;
    int word_count = 0;
    int vocab_size = 0;
    PosCounts pos_counts;

    friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

/// Deterministic features. Words come from identifiers (split on underscores
/// and camelCase), comments and string literals; the heuristic tagger uses a
/// small lexicon. `pos_override` replaces the tagger output when given.
/// Unparseable snippets get syntax_errors = 1 and zero AST fields.
FeatureVector extract_features(std::string_view snippet, const std::optional<PosCounts>& pos_override = std::nullopt);

/// Column names in the order of feature_values().
const std::vector<std::string>& feature_names();
std::vector<double> feature_values(const FeatureVector& f);

/// Reads sample_id plus one column per tag name (noun, proper_noun, ...).
std::map<std::string, PosCounts> parse_pos_annotations(const std::string& csv_text);

}  // namespace psc::causal
