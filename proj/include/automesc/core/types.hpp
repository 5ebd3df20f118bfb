#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace automesc {

/// The seven analyzers whose reports are fused. Closed set: configuration
/// naming any other tool is rejected when it is loaded.
enum class ToolId {
    Osiris,
    Slither,
    SmartCheck,
    Solhint,
    Honeybadger,
    Mythril,
    Maian,
};

inline constexpr std::array<ToolId, 7> kAllTools = {
    ToolId::Osiris, ToolId::Slither, ToolId::SmartCheck, ToolId::Solhint,
    ToolId::Honeybadger, ToolId::Mythril, ToolId::Maian,
};

std::string_view to_string(ToolId tool);
std::optional<ToolId> parse_tool(std::string_view name);

/// Ordinal severity, Low < Medium < High.
enum class SeverityLevel { Low = 1, Medium = 2, High = 3 };

std::string_view to_string(SeverityLevel level);
std::optional<SeverityLevel> parse_severity(std::string_view name);

enum class Language { Solidity, Vyper };

std::string_view to_string(Language language);
std::optional<Language> parse_language(std::string_view name);
// By extension: .sol or .vy. Anything else is not a contract source.
std::optional<Language> language_for_path(std::string_view path);

/// Commit-message keywords plus the context terms that tie a match to smart
/// contracts. Defaults are the mining keyword list used by the collector.
struct KeywordRuleSet {
    std::vector<std::string> keywords;
    std::vector<std::string> context_terms;

    static KeywordRuleSet defaults();
};

} // namespace automesc
