#include "automesc/core/taxonomy.hpp"

#include <cctype>
#include <sstream>

#include "automesc/util/error.hpp"
#include "automesc/util/strings.hpp"

namespace automesc {

std::string_view to_string(ToolId tool)
{
    switch (tool) {
    case ToolId::Osiris: return "Osiris";
    case ToolId::Slither: return "Slither";
    case ToolId::SmartCheck: return "SmartCheck";
    case ToolId::Solhint: return "Solhint";
    case ToolId::Honeybadger: return "Honeybadger";
    case ToolId::Mythril: return "Mythril";
    case ToolId::Maian: return "Maian";
    }
    return "?";
}

std::optional<ToolId> parse_tool(std::string_view name)
{
    for (ToolId t : kAllTools)
        if (to_string(t) == name)
            return t;
    return std::nullopt;
}

std::string_view to_string(SeverityLevel level)
{
    switch (level) {
    case SeverityLevel::Low: return "Low";
    case SeverityLevel::Medium: return "Medium";
    case SeverityLevel::High: return "High";
    }
    return "?";
}

std::optional<SeverityLevel> parse_severity(std::string_view name)
{
    const auto lower = util::to_lower(name);
    if (lower == "low" || lower == "1")
        return SeverityLevel::Low;
    if (lower == "medium" || lower == "2")
        return SeverityLevel::Medium;
    if (lower == "high" || lower == "3")
        return SeverityLevel::High;
    return std::nullopt;
}

std::string_view to_string(Language language)
{
    return language == Language::Solidity ? "Solidity" : "Vyper";
}

std::optional<Language> parse_language(std::string_view name)
{
    const auto lower = util::to_lower(name);
    if (lower == "solidity")
        return Language::Solidity;
    if (lower == "vyper")
        return Language::Vyper;
    return std::nullopt;
}

std::optional<Language> language_for_path(std::string_view path)
{
    if (util::ends_with(path, ".sol"))
        return Language::Solidity;
    if (util::ends_with(path, ".vy"))
        return Language::Vyper;
    return std::nullopt;
}

KeywordRuleSet KeywordRuleSet::defaults()
{
    return {
        {"security", "vulnerability", "vulnerable", "exploit", "threat", "expose", "bug", "defect", "insecure"},
        {"smart contract", "Solidity", "Vyper", "Ethereum"},
    };
}

int DetectionCapabilityMatrix::threshold_for(std::string_view canonical) const
{
    return row(canonical).threshold;
}

const CapabilityRow& DetectionCapabilityMatrix::row(std::string_view canonical) const
{
    auto it = rows_.find(canonical);
    if (it == rows_.end())
        throw Error(ErrorCode::UnknownCanonicalId, std::string(canonical));
    return it->second;
}

namespace {

struct Section {
    CanonicalVulnerability type;
    std::size_t line = 0;
    std::optional<int> threshold;
    std::size_t threshold_line = 0;
    bool threshold_override = false;
    std::vector<std::pair<LabelMapping, std::size_t>> mappings;
};

std::string position(const std::string& source, std::size_t line, std::size_t column)
{
    std::ostringstream ss;
    ss << source << ':' << line << ':' << column;
    return ss.str();
}

bool valid_id(std::string_view id)
{
    if (id.empty())
        return false;
    for (char c : id)
        if (!(std::islower(static_cast<unsigned char>(c)) || std::isdigit(static_cast<unsigned char>(c)) || c == '-'))
            return false;
    return true;
}

} // namespace

Taxonomy Taxonomy::parse(std::string_view text, const std::string& source)
{
    std::vector<Section> sections;
    const auto lines = util::split_lines(text);

    for (std::size_t i = 0; i < lines.size(); ++i) {
        const std::size_t lineno = i + 1;
        std::string_view raw = lines[i];
        if (!raw.empty() && raw.back() == '\r')
            raw.remove_suffix(1);
        const std::string_view line = util::trim(raw);
        const std::size_t indent = static_cast<std::size_t>(line.empty() ? 0 : line.data() - raw.data());
        if (line.empty() || line.front() == '#')
            continue;

        if (line.front() == '[') {
            if (line.back() != ']')
                throw Error(ErrorCode::ParseError, position(source, lineno, indent + line.size()) + ": expected ']'");
            std::string id(util::trim(line.substr(1, line.size() - 2)));
            if (!valid_id(id))
                throw Error(ErrorCode::ParseError,
                            position(source, lineno, indent + 2) + ": invalid canonical id '" + id + "'");
            for (const auto& s : sections)
                if (s.type.id == id)
                    throw Error(ErrorCode::ParseError,
                                position(source, lineno, indent + 2) + ": duplicate canonical id '" + id + "'");
            Section s;
            s.type.id = std::move(id);
            s.type.provenance = "extrapolated";
            s.line = lineno;
            sections.push_back(std::move(s));
            continue;
        }

        auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw Error(ErrorCode::ParseError, position(source, lineno, indent + 1) + ": expected 'key = value'");
        const std::string key(util::trim(line.substr(0, eq)));
        const std::string value(util::trim(line.substr(eq + 1)));
        const std::size_t value_col = indent + eq + 2;

        if (sections.empty()) {
            if (key == "version")
                continue;
            throw Error(ErrorCode::ParseError, position(source, lineno, indent + 1) + ": '" + key + "' outside a [section]");
        }
        Section& s = sections.back();

        if (key == "name") {
            s.type.display_name = value;
        } else if (key == "description") {
            s.type.description = value;
        } else if (key == "provenance") {
            if (value != "published" && value != "extrapolated")
                throw Error(ErrorCode::ParseError, position(source, lineno, value_col) + ": provenance must be published|extrapolated");
            s.type.provenance = value;
        } else if (key == "severity") {
            auto sev = parse_severity(value);
            if (!sev)
                throw Error(ErrorCode::ParseError, position(source, lineno, value_col) + ": unknown severity '" + value + "'");
            s.type.default_severity = sev;
        } else if (key == "threshold") {
            auto t = util::parse_int(value);
            if (!t || *t < 1)
                throw Error(ErrorCode::ParseError, position(source, lineno, value_col) + ": threshold must be a positive integer");
            s.threshold = static_cast<int>(*t);
            s.threshold_line = lineno;
        } else if (key == "threshold_override") {
            if (value != "true" && value != "false")
                throw Error(ErrorCode::ParseError, position(source, lineno, value_col) + ": expected true|false");
            s.threshold_override = value == "true";
        } else if (auto tool = parse_tool(key)) {
            if (value.empty())
                throw Error(ErrorCode::ParseError, position(source, lineno, value_col) + ": empty raw label");
            s.mappings.push_back({LabelMapping{*tool, value, s.type.id}, lineno});
        } else {
            throw Error(ErrorCode::UnknownTool, position(source, lineno, indent + 1) + ": unknown tool or key '" + key + "'");
        }
    }

    Taxonomy tax;
    std::map<std::string, CapabilityRow, std::less<>> rows;
    for (auto& s : sections) {
        if (s.type.display_name.empty())
            s.type.display_name = s.type.id;
        if (s.mappings.empty())
            throw Error(ErrorCode::DanglingCanonicalId,
                        position(source, s.line, 1) + ": '" + s.type.id + "' is not mapped by any tool");

        CapabilityRow row;
        for (auto& [m, lineno] : s.mappings) {
            auto key = std::make_pair(m.tool, m.raw_label);
            if (tax.index_.count(key))
                throw Error(ErrorCode::DuplicateMapping,
                            position(source, lineno, 1) + ": (" + std::string(to_string(m.tool)) + ", \"" + m.raw_label +
                                "\") already mapped to '" + tax.index_.find(key)->second + "'");
            tax.index_.emplace(key, m.canonical);
            row.supporting_tools.insert(m.tool);
            tax.mappings_.push_back(m);
        }
        const int expected = majority_threshold(row.supporting_tools.size());
        row.threshold = s.threshold.value_or(expected);
        row.threshold_override = s.threshold_override;
        if (row.threshold > static_cast<int>(row.supporting_tools.size()))
            throw Error(ErrorCode::ThresholdMismatch,
                        position(source, s.threshold_line, 1) + ": threshold exceeds supporting tool count for '" + s.type.id + "'");
        if (row.threshold != expected && !row.threshold_override)
            throw Error(ErrorCode::ThresholdMismatch,
                        position(source, s.threshold_line, 1) + ": '" + s.type.id + "' has " +
                            std::to_string(row.supporting_tools.size()) + " supporting tools, threshold must be " +
                            std::to_string(expected) + " (got " + std::to_string(row.threshold) + ")");
        rows.emplace(s.type.id, std::move(row));
        tax.type_index_.emplace(s.type.id, tax.types_.size());
        tax.types_.push_back(std::move(s.type));
    }
    tax.matrix_ = DetectionCapabilityMatrix(std::move(rows));
    return tax;
}

Taxonomy Taxonomy::load_file(const std::string& path)
{
    return parse(util::read_file(path), path);
}

const Taxonomy& Taxonomy::builtin()
{
    static const Taxonomy tax = parse(builtin_text(), "builtin:taxonomy.txt");
    return tax;
}

std::optional<std::string> Taxonomy::unify_label(ToolId tool, std::string_view raw_label) const
{
    auto it = index_.find(std::make_pair(tool, std::string(util::trim(raw_label))));
    if (it == index_.end())
        return std::nullopt;
    return it->second;
}

const CanonicalVulnerability& Taxonomy::type(std::string_view canonical) const
{
    auto it = type_index_.find(canonical);
    if (it == type_index_.end())
        throw Error(ErrorCode::UnknownCanonicalId, std::string(canonical));
    return types_[it->second];
}

std::optional<SeverityLevel> Taxonomy::default_severity(std::string_view canonical) const
{
    return type(canonical).default_severity;
}

} // namespace automesc
