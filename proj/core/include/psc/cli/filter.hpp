#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace psc::cli {

struct CorpusFilter {
    std::size_t max_tokens = 700;
    std::size_t per_rule_cap = 500;
    std::uint64_t seed = 0;

    void validate() const;  // throws ConfigError on a zero cap
};

struct CorpusEntry {
    std::string sample_id;
    std::string rule_id;
    std::size_t token_count = 0;
    std::size_t index = 0;  // caller's position, carried through
};

/// Drops entries over max_tokens, then keeps exactly per_rule_cap entries of
/// every rule that has at least that many (seeded sample, input order kept)
/// and removes rules with fewer.
std::vector<CorpusEntry> filter_corpus(const std::vector<CorpusEntry>& corpus, const CorpusFilter& filter);

}  // namespace psc::cli
