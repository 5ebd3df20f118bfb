#include "automesc/miner/keywords.hpp"

#include "automesc/util/strings.hpp"

namespace automesc::miner {

MatchResult match_commit(std::string_view msg, const KeywordRuleSet& rules, bool language_filtered)
{
    MatchResult r;
    for (const auto& k : rules.keywords)
        if (util::contains_word_ci(msg, k))
            r.keywords.push_back(k);
    for (const auto& t : rules.context_terms)
        if (util::contains_word_ci(msg, t))
            r.context_terms.push_back(t);
    r.context_waived = language_filtered;
    r.matched = !r.keywords.empty() && (language_filtered || !r.context_terms.empty());
    return r;
}

} // namespace automesc::miner
