#include <algorithm>
#include <cctype>

#include "automesc/lexing/source.hpp"
#include "automesc/util/strings.hpp"

namespace automesc::lexing {

std::string_view to_string(MethodKind kind)
{
    switch (kind) {
    case MethodKind::Function: return "function";
    case MethodKind::Constructor: return "constructor";
    case MethodKind::Modifier: return "modifier";
    case MethodKind::Fallback: return "fallback";
    case MethodKind::Def: return "def";
    }
    return "?";
}

namespace {

class LineIndex {
public:
    explicit LineIndex(std::string_view text)
    {
        starts_.push_back(0);
        for (std::size_t i = 0; i < text.size(); ++i)
            if (text[i] == '\n')
                starts_.push_back(i + 1);
    }

    // 1-based line containing byte offset `pos`.
    std::size_t line_of(std::size_t pos) const
    {
        auto it = std::upper_bound(starts_.begin(), starts_.end(), pos);
        return static_cast<std::size_t>(it - starts_.begin());
    }

private:
    std::vector<std::size_t> starts_;
};

bool ident_start(char c)
{
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '$';
}

bool ident_char(char c)
{
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$';
}

std::size_t skip_space(std::string_view s, std::size_t i)
{
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i])))
        ++i;
    return i;
}

std::string read_ident(std::string_view s, std::size_t& i)
{
    std::size_t start = i;
    while (i < s.size() && ident_char(s[i]))
        ++i;
    return std::string(s.substr(start, i - start));
}

void extract_solidity(const SourceFile& file, std::string_view code, MethodExtraction& out)
{
    const LineIndex lines(code);
    std::size_t i = 0;
    while (i < code.size()) {
        if (!ident_start(code[i])) {
            ++i;
            continue;
        }
        const std::size_t kw_pos = i;
        const bool after_dot = [&] {
            std::size_t j = kw_pos;
            while (j > 0 && std::isspace(static_cast<unsigned char>(code[j - 1])))
                --j;
            return j > 0 && code[j - 1] == '.';
        }();
        const std::string word = read_ident(code, i);
        if (after_dot)
            continue;

        MethodKind kind;
        std::string name;
        std::size_t cursor = skip_space(code, i);
        if (word == "function") {
            if (cursor < code.size() && code[cursor] == '(') {
                kind = MethodKind::Fallback;
                name = "fallback";
            } else if (cursor < code.size() && ident_start(code[cursor])) {
                kind = MethodKind::Function;
                name = read_ident(code, cursor);
            } else {
                continue;
            }
        } else if (word == "constructor" || word == "fallback" || word == "receive") {
            if (cursor >= code.size() || code[cursor] != '(')
                continue;
            kind = word == "constructor" ? MethodKind::Constructor : MethodKind::Fallback;
            name = word;
        } else if (word == "modifier") {
            if (cursor >= code.size() || !ident_start(code[cursor]))
                continue;
            kind = MethodKind::Modifier;
            name = read_ident(code, cursor);
        } else {
            continue;
        }

        // First '{' or ';' outside parentheses ends the header.
        int paren = 0;
        std::size_t j = cursor;
        for (; j < code.size(); ++j) {
            char c = code[j];
            if (c == '(')
                ++paren;
            else if (c == ')')
                --paren;
            else if (paren <= 0 && (c == '{' || c == ';'))
                break;
        }
        if (j >= code.size()) {
            out.warnings.push_back("UnbalancedBraces: " + file.path + ": header of '" + name + "' has no body or terminator");
            break;
        }
        const std::size_t header_line = lines.line_of(kw_pos);
        if (code[j] == ';') {
            // Unnamed `function (...) ... ;` is a function-typed variable.
            if (!(word == "function" && kind == MethodKind::Fallback))
                out.spans.push_back({name, header_line, header_line, kind});
            i = j + 1;
            continue;
        }

        int depth = 0;
        std::size_t k = j;
        for (; k < code.size(); ++k) {
            if (code[k] == '{')
                ++depth;
            else if (code[k] == '}' && --depth == 0)
                break;
        }
        if (k >= code.size()) {
            out.warnings.push_back("UnbalancedBraces: " + file.path + ": body of '" + name + "' starting on line " +
                                   std::to_string(header_line) + " is not closed");
            break;
        }
        out.spans.push_back({name, header_line, lines.line_of(k), kind});
        i = k + 1;
    }
}

std::size_t indentation(std::string_view line)
{
    std::size_t n = 0;
    while (n < line.size() && (line[n] == ' ' || line[n] == '\t'))
        ++n;
    return n;
}

void extract_vyper(std::string_view code, MethodExtraction& out)
{
    const auto lines = util::split_lines(code);
    for (std::size_t li = 0; li < lines.size(); ++li) {
        std::string_view line = lines[li];
        const std::size_t indent = indentation(line);
        std::string_view rest = line.substr(indent);
        if (rest.size() < 4 || rest.substr(0, 3) != "def" || !std::isspace(static_cast<unsigned char>(rest[3])))
            continue;
        std::size_t p = skip_space(rest, 3);
        if (p >= rest.size() || !ident_start(rest[p]))
            continue;
        const std::string name = read_ident(rest, p);

        // Header may continue over several lines until ':' outside parens.
        int paren = 0;
        std::size_t header_end = li;
        std::size_t colon_col = std::string::npos;
        for (std::size_t hl = li; hl < lines.size() && colon_col == std::string::npos; ++hl) {
            std::string_view h = lines[hl];
            for (std::size_t c = hl == li ? indent + p : 0; c < h.size(); ++c) {
                if (h[c] == '(' || h[c] == '[')
                    ++paren;
                else if (h[c] == ')' || h[c] == ']')
                    --paren;
                else if (h[c] == ':' && paren <= 0) {
                    colon_col = c;
                    header_end = hl;
                    break;
                }
            }
        }
        if (colon_col == std::string::npos) {
            out.warnings.push_back("UnterminatedHeader: def " + name);
            continue;
        }

        std::size_t end = header_end;
        if (util::trim(std::string_view(lines[header_end]).substr(colon_col + 1)).empty()) {
            for (std::size_t bl = header_end + 1; bl < lines.size(); ++bl) {
                std::string_view b = lines[bl];
                if (util::trim(b).empty())
                    continue;
                if (indentation(b) <= indent)
                    break;
                end = bl;
            }
        }
        out.spans.push_back({name, li + 1, end + 1, MethodKind::Def});
        li = header_end;
    }
}

} // namespace

MethodExtraction extract_methods(const SourceFile& file)
{
    MethodExtraction out;
    const LexResult lexed = lex(file.content, file.language);
    const std::string code = mask_non_code(file.content, lexed);
    if (file.language == Language::Solidity)
        extract_solidity(file, code, out);
    else
        extract_vyper(code, out);
    std::stable_sort(out.spans.begin(), out.spans.end(),
                     [](const MethodSpan& a, const MethodSpan& b) { return a.start_line < b.start_line; });
    return out;
}

} // namespace automesc::lexing
