#include "psc/cli/filter.hpp"

#include <algorithm>
#include <map>
#include <random>

#include "psc/errors.hpp"
#include "psc/util/random.hpp"

namespace psc::cli {

void CorpusFilter::validate() const {
    if (max_tokens == 0 || per_rule_cap == 0) throw ConfigError("corpus filter caps must be positive");
}

std::vector<CorpusEntry> filter_corpus(const std::vector<CorpusEntry>& corpus, const CorpusFilter& filter) {
    filter.validate();
    std::map<std::string, std::vector<std::size_t>> by_rule;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        if (corpus[i].token_count <= filter.max_tokens) by_rule[corpus[i].rule_id].push_back(i);
    }
    std::vector<std::size_t> keep;
    for (auto& [rule, idx] : by_rule) {
        if (idx.size() < filter.per_rule_cap) continue;
        std::mt19937_64 rng(util::derive_seed(filter.seed, "filter|" + rule));
        util::shuffle(idx, rng);
        keep.insert(keep.end(), idx.begin(), idx.begin() + static_cast<long>(filter.per_rule_cap));
    }
    std::sort(keep.begin(), keep.end());
    std::vector<CorpusEntry> out;
    out.reserve(keep.size());
    for (auto i : keep) out.push_back(corpus[i]);
    return out;
}

}  // namespace psc::cli
