#include "automesc/tools/adapters.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <map>

#include "automesc/util/strings.hpp"

namespace automesc::tools {

using nlohmann::json;

const std::map<std::string, std::string>& smartcheck_rule_names()
{
    static const std::map<std::string, std::string> names{
        {"SOLIDITY_ADDRESS_HARDCODED", "Hardcoded address"},
        {"SOLIDITY_ARRAY_LENGTH_MANIPULATION", "Array length manipulation"},
        {"SOLIDITY_BALANCE_EQUALITY", "Balance equality"},
        {"SOLIDITY_CALL_WITHOUT_DATA", "Reentrancy"},
        {"SOLIDITY_DEPRECATED_CONSTRUCTIONS", "Deprecated constructions"},
        {"SOLIDITY_DIV_MUL", "Multiplication after division"},
        {"SOLIDITY_DOS_WITH_THROW", "DoS by external contract"},
        {"SOLIDITY_EXACT_TIME", "Comparison with block.timestamp"},
        {"SOLIDITY_EXTRA_GAS_IN_LOOPS", "Extra gas consumption"},
        {"SOLIDITY_GAS_LIMIT_IN_LOOPS", "Costly loop"},
        {"SOLIDITY_INCORRECT_BLOCKHASH", "Incorrect blockhash"},
        {"SOLIDITY_LOCKED_MONEY", "Locked money"},
        {"SOLIDITY_OVERPOWERED_ROLE", "Overpowered role"},
        {"SOLIDITY_PRAGMAS_VERSION", "Compiler version not fixed"},
        {"SOLIDITY_PRIVATE_MODIFIER_DONT_HIDE_DATA", "Private modifier"},
        {"SOLIDITY_PURE_FUNCTIONS_READ_STATE", "Pure-functions should not read"},
        {"SOLIDITY_PURE_FUNCTIONS_CHANGE_STATE", "Pure-functions should not change state"},
        {"SOLIDITY_REVERT_REQUIRE", "Revert inside the if-operator"},
        {"SOLIDITY_SAFEMATH", "Use of SafeMath"},
        {"SOLIDITY_SHOULD_RETURN_STRUCT", "Replace multiple return values with a struct"},
        {"SOLIDITY_TX_ORIGIN", "Using tx.origin"},
        {"SOLIDITY_UINT_CANT_BE_NEGATIVE", "Unchecked math"},
        {"SOLIDITY_UNCHECKED_CALL", "Unchecked external call"},
        {"SOLIDITY_UNCHECKED_LOW_LEVEL_CALL", "Unchecked low-level call"},
        {"SOLIDITY_UPGRADE_TO_050", "Upgrade code to Solidity 0.5.x"},
        {"SOLIDITY_USING_INLINE_ASSEMBLY", "Use of assembly"},
        {"SOLIDITY_VAR", "Implicit type inference"},
        {"SOLIDITY_VIEW_FUNCTIONS_CHANGE_STATE", "View-function should not change state"},
        {"SOLIDITY_VISIBILITY", "Implicit visibility level"},
    };
    return names;
}

namespace {

ParsedOutput unparseable(std::string why)
{
    ParsedOutput p;
    p.unparseable = true;
    p.error = std::move(why);
    return p;
}

std::size_t positive_line(const json& v)
{
    if (v.is_number_integer() && v.get<std::int64_t>() > 0)
        return static_cast<std::size_t>(v.get<std::int64_t>());
    if (v.is_string()) {
        auto n = util::parse_int(v.get<std::string>());
        if (n && *n > 0)
            return static_cast<std::size_t>(*n);
    }
    return 0;
}

std::string first_line(std::string_view s)
{
    auto nl = s.find('\n');
    return std::string(util::trim(s.substr(0, nl)));
}

// {"success": true, "results": {"detectors": [{"check", "description",
//   "elements": [{"source_mapping": {"lines": [..]}}]}]}}
ParsedOutput parse_slither(const ToolRun& run, const json& doc)
{
    if (!doc.is_object())
        return unparseable("slither output is not an object");
    if (doc.contains("success") && doc["success"].is_boolean() && !doc["success"].get<bool>())
        return unparseable("slither reported failure: " + doc.value("error", std::string{}));
    ParsedOutput out;
    auto results = doc.find("results");
    if (results == doc.end() || !results->is_object())
        return out;
    auto detectors = results->find("detectors");
    if (detectors == results->end())
        return out;
    if (!detectors->is_array())
        return unparseable("slither results.detectors is not an array");
    for (const auto& d : *detectors) {
        if (!d.is_object() || !d.contains("check") || !d["check"].is_string())
            return unparseable("slither detector entry without check");
        RawFinding f{run.tool, d["check"].get<std::string>(), run.target_path, 0, {}};
        for (const auto& e : d.value("elements", json::array())) {
            const auto sm = e.value("source_mapping", json::object());
            const auto lines = sm.value("lines", json::array());
            std::size_t best = 0;
            for (const auto& l : lines) {
                auto n = positive_line(l);
                if (n && (!best || n < best))
                    best = n;
            }
            if (best) {
                f.line = best;
                break;
            }
        }
        if (d.contains("description") && d["description"].is_string())
            f.extra = first_line(d["description"].get<std::string>());
        out.findings.push_back(std::move(f));
    }
    return out;
}

// {"success": true, "issues": [{"title", "swc-id", "lineno", "description"}]}
ParsedOutput parse_mythril(const ToolRun& run, const json& doc)
{
    if (!doc.is_object())
        return unparseable("mythril output is not an object");
    if (doc.contains("success") && doc["success"].is_boolean() && !doc["success"].get<bool>())
        return unparseable("mythril reported failure: " + doc.value("error", std::string{}));
    ParsedOutput out;
    auto issues = doc.find("issues");
    if (issues == doc.end())
        return out;
    if (!issues->is_array())
        return unparseable("mythril issues is not an array");
    for (const auto& i : *issues) {
        if (!i.is_object() || !i.contains("title") || !i["title"].is_string())
            return unparseable("mythril issue without title");
        RawFinding f{run.tool, i["title"].get<std::string>(), run.target_path, 0, {}};
        if (i.contains("lineno"))
            f.line = positive_line(i["lineno"]);
        if (i.contains("swc-id"))
            f.extra = "SWC-" + (i["swc-id"].is_string() ? i["swc-id"].get<std::string>() : i["swc-id"].dump());
        out.findings.push_back(std::move(f));
    }
    return out;
}

// [{"filePath", "messages": [{"ruleId", "line", "message"}]}]
ParsedOutput parse_solhint(const ToolRun& run, const json& doc)
{
    if (!doc.is_array())
        return unparseable("solhint output is not an array");
    ParsedOutput out;
    for (const auto& file : doc) {
        if (!file.is_object())
            return unparseable("solhint report entry is not an object");
        for (const auto& m : file.value("messages", json::array())) {
            if (!m.is_object() || !m.contains("ruleId") || !m["ruleId"].is_string())
                return unparseable("solhint message without ruleId");
            RawFinding f{run.tool, m["ruleId"].get<std::string>(), run.target_path, 0, {}};
            if (m.contains("line"))
                f.line = positive_line(m["line"]);
            if (m.contains("message") && m["message"].is_string())
                f.extra = m["message"].get<std::string>();
            out.findings.push_back(std::move(f));
        }
    }
    return out;
}

// Blocks of "key: value" lines, each starting with "ruleId:".
ParsedOutput parse_smartcheck(const ToolRun& run)
{
    ParsedOutput out;
    RawFinding* current = nullptr;
    for (const auto& raw : util::split_lines(run.raw_output)) {
        auto line = util::trim(raw);
        auto colon = line.find(':');
        if (colon == std::string_view::npos)
            continue;
        auto key = util::trim(line.substr(0, colon));
        auto value = std::string(util::trim(line.substr(colon + 1)));
        if (key == "ruleId") {
            if (value.empty())
                return unparseable("smartcheck block with empty ruleId");
            const auto& names = smartcheck_rule_names();
            auto it = names.find(value);
            out.findings.push_back({run.tool, it == names.end() ? value : it->second, run.target_path, 0, value});
            current = &out.findings.back();
        } else if (key == "line" && current) {
            auto n = util::parse_int(value);
            if (!n || *n < 0)
                return unparseable("smartcheck line value '" + value + "'");
            current->line = static_cast<std::size_t>(*n);
        }
    }
    return out;
}

// Oyente-derived text: summary lines "INFO:symExec:\t<Kind>:\tTrue|False" and
// located lines "<path>:<line>:<col>: Warning: <Kind>.".
ParsedOutput parse_oyente_style(const ToolRun& run, const std::map<std::string, std::string>& aliases)
{
    auto canonical_label = [&](std::string kind) {
        while (!kind.empty() && (kind.back() == '.' || kind.back() == ' '))
            kind.pop_back();
        // Sub-results are indented with a tree marker ("└> Overflow bugs").
        auto first = std::find_if(kind.begin(), kind.end(), [](char c) { return std::isalnum(static_cast<unsigned char>(c)); });
        kind.erase(kind.begin(), first);
        auto it = aliases.find(util::to_lower(kind));
        return it == aliases.end() ? kind : it->second;
    };

    if (run.raw_output.find("INFO:") == std::string::npos && run.raw_output.find("Warning:") == std::string::npos &&
        !util::trim(run.raw_output).empty())
        return unparseable("no symExec report lines");

    ParsedOutput out;
    std::vector<std::string> flagged; // summary kinds reported True
    for (const auto& raw : util::split_lines(run.raw_output)) {
        std::string_view line = raw;
        auto warn = line.find(": Warning: ");
        if (warn != std::string_view::npos) {
            // "<path>:<line>:<col>" precedes the marker; path may contain ':'.
            auto loc = line.substr(0, warn);
            if (loc.rfind("INFO:symExec:", 0) == 0)
                loc.remove_prefix(13);
            auto c2 = loc.rfind(':');
            auto c1 = c2 == std::string_view::npos ? c2 : loc.rfind(':', c2 - 1);
            std::size_t lineno = 0;
            if (c1 != std::string_view::npos) {
                auto n = util::parse_int(loc.substr(c1 + 1, c2 - c1 - 1));
                if (n && *n > 0)
                    lineno = static_cast<std::size_t>(*n);
            }
            auto message = std::string(util::trim(line.substr(warn + 11)));
            out.findings.push_back({run.tool, canonical_label(message), run.target_path, lineno, message});
            continue;
        }
        auto info = line.find("INFO:symExec:");
        if (info == std::string_view::npos)
            continue;
        auto body = util::trim(line.substr(info + 13));
        auto colon = body.rfind(':');
        if (colon == std::string_view::npos)
            continue;
        auto verdict = util::trim(body.substr(colon + 1));
        if (verdict == "True")
            flagged.push_back(canonical_label(std::string(util::trim(body.substr(0, colon)))));
    }
    // A kind flagged in the summary but never located is file-scoped.
    for (const auto& kind : flagged) {
        bool located = std::any_of(out.findings.begin(), out.findings.end(),
                                   [&](const RawFinding& f) { return f.raw_label == kind; });
        if (!located)
            out.findings.push_back({run.tool, kind, run.target_path, 0, "summary"});
    }
    return out;
}

const std::map<std::string, std::string>& osiris_aliases()
{
    static const std::map<std::string, std::string> m{
        {"overflow bugs", "Arithmetic Bugs"},
        {"underflow bugs", "Arithmetic Bugs"},
        {"division bugs", "Arithmetic Bugs"},
        {"modulo bugs", "Arithmetic Bugs"},
        {"truncation bugs", "Arithmetic Bugs"},
        {"signedness bugs", "Arithmetic Bugs"},
        {"arithmetic bugs", "Arithmetic Bugs"},
        {"overflow bug", "Arithmetic Bugs"},
        {"underflow bug", "Arithmetic Bugs"},
        {"integer overflow", "Arithmetic Bugs"},
        {"integer underflow", "Arithmetic Bugs"},
        {"division bug", "Arithmetic Bugs"},
        {"modulo bug", "Arithmetic Bugs"},
        {"truncation bug", "Arithmetic Bugs"},
        {"signedness bug", "Arithmetic Bugs"},
        {"callstack bug", "Callstack Depth Attack Vulnerability"},
        {"callstack depth attack vulnerability", "Callstack Depth Attack Vulnerability"},
        {"concurrency bug", "Transaction-Ordering Dependency"},
        {"transaction-ordering dependency", "Transaction-Ordering Dependency"},
        {"timedependency bug", "Timestamp Dependency"},
        {"timestamp dependency", "Timestamp Dependency"},
        {"reentrancy bug", "Re-Entrancy Vulnerability"},
        {"re-entrancy vulnerability", "Re-Entrancy Vulnerability"},
    };
    return m;
}

const std::map<std::string, std::string>& honeybadger_aliases()
{
    static const std::map<std::string, std::string> m{
        {"balance disorder", "Balance Disorder"},
        {"hidden transfer", "Hidden Transfer"},
        {"inheritance disorder", "Inheritance Disorder"},
        {"uninitialised struct", "Uninitialised Struct"},
        {"type deduction overflow", "Type Deduction Overflow"},
        {"skip empty string", "Skip Empty String Literal"},
        {"skip empty string literal", "Skip Empty String Literal"},
        {"hidden state update", "Hidden State Update"},
        {"straw man contract", "Straw Man Contract"},
    };
    return m;
}

// "[-] <Kind> vulnerability found!" lines; Maian reports no positions.
ParsedOutput parse_maian(const ToolRun& run)
{
    static const std::map<std::string, std::string> kinds{
        {"suicidal", "suicidal contract"},
        {"leak", "prodigal contract"},
        {"prodigal", "prodigal contract"},
        {"locking", "Greedy contracts"},
        {"greedy", "Greedy contracts"},
    };
    if (run.raw_output.find("[ ]") == std::string::npos && run.raw_output.find("[+]") == std::string::npos &&
        run.raw_output.find("[-]") == std::string::npos && !util::trim(run.raw_output).empty())
        return unparseable("no Maian status lines");
    ParsedOutput out;
    for (const auto& raw : util::split_lines(run.raw_output)) {
        auto line = util::trim(raw);
        if (line.rfind("[-]", 0) != 0)
            continue;
        auto body = util::trim(line.substr(3));
        auto text = util::to_lower(body);
        auto pos = text.find(" vulnerability found");
        if (pos == std::string::npos)
            continue;
        auto kind = text.substr(0, pos);
        auto it = kinds.find(kind);
        std::string label = it == kinds.end() ? std::string(body.substr(0, pos)) : it->second;
        bool dup = std::any_of(out.findings.begin(), out.findings.end(), [&](const RawFinding& f) { return f.raw_label == label; });
        if (!dup)
            out.findings.push_back({run.tool, label, run.target_path, 0, std::string(line)});
    }
    return out;
}

ParsedOutput parse_json_tool(const ToolRun& run)
{
    std::string_view text = run.raw_output;
    // Some tools print banner lines before the JSON document.
    auto start = text.find_first_of("{[");
    if (start == std::string_view::npos)
        return util::trim(text).empty() ? ParsedOutput{} : unparseable("no JSON document in output");
    json doc;
    try {
        doc = json::parse(text.substr(start));
    } catch (const json::exception& e) {
        return unparseable(std::string("invalid JSON: ") + e.what());
    }
    switch (run.tool) {
    case ToolId::Slither: return parse_slither(run, doc);
    case ToolId::Mythril: return parse_mythril(run, doc);
    default: return parse_solhint(run, doc);
    }
}

} // namespace

ParsedOutput parse_output(const ToolRun& run)
{
    if (run.exit_status != ExitStatus::Ok)
        return {};
    ParsedOutput out;
    switch (run.tool) {
    case ToolId::Slither:
    case ToolId::Mythril:
    case ToolId::Solhint: out = parse_json_tool(run); break;
    case ToolId::SmartCheck: out = parse_smartcheck(run); break;
    case ToolId::Osiris: out = parse_oyente_style(run, osiris_aliases()); break;
    case ToolId::Honeybadger: out = parse_oyente_style(run, honeybadger_aliases()); break;
    case ToolId::Maian: out = parse_maian(run); break;
    }
    if (out.unparseable)
        out.findings.clear();
    return out;
}

} // namespace automesc::tools
