#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "automesc/core/types.hpp"

namespace automesc::miner {

struct MatchResult {
    bool matched = false;
    std::vector<std::string> keywords;      // every keyword hit, in rule order
    std::vector<std::string> context_terms; // every context-term hit, in rule order
    bool context_waived = false;
};

// Keywords and context terms match case-insensitively on word boundaries.
// `language_filtered` is true when the commit comes from a repository already
// selected by its Solidity/Vyper primary language; the context-term
// requirement is then waived.
MatchResult match_commit(std::string_view msg, const KeywordRuleSet& rules, bool language_filtered = true);

} // namespace automesc::miner
