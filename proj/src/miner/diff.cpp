#include "automesc/miner/diff.hpp"

#include <algorithm>

#include "automesc/util/error.hpp"
#include "automesc/util/strings.hpp"

namespace automesc::miner {

std::vector<std::size_t> Hunk::removed_line_numbers() const
{
    std::vector<std::size_t> out;
    std::size_t old_line = old_start;
    for (const auto& l : lines) {
        if (l.kind == HunkLineKind::Added)
            continue;
        if (l.kind == HunkLineKind::Removed)
            out.push_back(old_line);
        ++old_line;
    }
    return out;
}

namespace {

// "-12,3" / "+4" after the sign.
bool parse_range(std::string_view s, std::size_t& start, std::size_t& len)
{
    auto comma = s.find(',');
    auto a = util::parse_int(s.substr(0, comma));
    if (!a || *a < 0)
        return false;
    start = static_cast<std::size_t>(*a);
    if (comma == std::string_view::npos) {
        len = 1;
        return true;
    }
    auto b = util::parse_int(s.substr(comma + 1));
    if (!b || *b < 0)
        return false;
    len = static_cast<std::size_t>(*b);
    return true;
}

Hunk parse_header(std::string_view line, std::size_t lineno)
{
    auto fail = [&] {
        return Error(ErrorCode::MalformedHunkHeader,
                     "line " + std::to_string(lineno) + ": '" + std::string(line) + "'");
    };
    if (line.substr(0, 3) != "@@ ")
        throw fail();
    auto close = line.find(" @@", 2);
    if (close == std::string_view::npos)
        throw fail();
    auto ranges = util::split(line.substr(3, close - 3), ' ');
    if (ranges.size() != 2 || ranges[0].size() < 2 || ranges[1].size() < 2 || ranges[0][0] != '-' || ranges[1][0] != '+')
        throw fail();
    Hunk h;
    if (!parse_range(std::string_view(ranges[0]).substr(1), h.old_start, h.old_len) ||
        !parse_range(std::string_view(ranges[1]).substr(1), h.new_start, h.new_len))
        throw fail();
    return h;
}

struct Lines {
    std::vector<std::string> lines;
    bool final_newline = true;
};

Lines split_content(std::string_view s)
{
    Lines l;
    l.lines = util::split_lines(s);
    l.final_newline = s.empty() || s.back() == '\n';
    return l;
}

} // namespace

std::vector<Hunk> parse_diff(std::string_view diff)
{
    std::vector<Hunk> hunks;
    const auto lines = util::split_lines(diff);
    std::size_t i = 0;
    while (i < lines.size() && lines[i].rfind("@@", 0) != 0)
        ++i;

    while (i < lines.size()) {
        const std::size_t header_lineno = i + 1;
        Hunk h = parse_header(lines[i], header_lineno);
        ++i;
        std::size_t old_seen = 0, new_seen = 0;
        while (i < lines.size() && (old_seen < h.old_len || new_seen < h.new_len)) {
            const std::string& l = lines[i];
            if (l.rfind("@@", 0) == 0)
                break;
            if (!l.empty() && l[0] == '\\') {
                if (!h.lines.empty())
                    h.lines.back().no_newline_at_eof = true;
                ++i;
                continue;
            }
            HunkLineKind kind;
            std::string text = l.empty() ? std::string{} : l.substr(1);
            if (l.empty() || l[0] == ' ')
                kind = HunkLineKind::Context;
            else if (l[0] == '-')
                kind = HunkLineKind::Removed;
            else if (l[0] == '+')
                kind = HunkLineKind::Added;
            else
                throw Error(ErrorCode::LineCountMismatch,
                            "hunk at line " + std::to_string(header_lineno) + ": unexpected line " + std::to_string(i + 1));
            if (kind != HunkLineKind::Added)
                ++old_seen;
            if (kind != HunkLineKind::Removed)
                ++new_seen;
            if (kind == HunkLineKind::Removed)
                h.removed_lines.push_back(text);
            if (kind == HunkLineKind::Added)
                h.added_lines.push_back(text);
            h.lines.push_back({kind, std::move(text)});
            ++i;
        }
        while (i < lines.size() && !lines[i].empty() && lines[i][0] == '\\') {
            if (!h.lines.empty())
                h.lines.back().no_newline_at_eof = true;
            ++i;
        }
        if (old_seen != h.old_len || new_seen != h.new_len)
            throw Error(ErrorCode::LineCountMismatch,
                        "hunk at line " + std::to_string(header_lineno) + ": header declares -" + std::to_string(h.old_len) +
                            " +" + std::to_string(h.new_len) + ", body has -" + std::to_string(old_seen) + " +" +
                            std::to_string(new_seen));
        if (i < lines.size() && lines[i].rfind("@@", 0) != 0)
            throw Error(ErrorCode::LineCountMismatch,
                        "hunk at line " + std::to_string(header_lineno) + ": trailing line " + std::to_string(i + 1) +
                            " beyond declared length");
        hunks.push_back(std::move(h));
    }
    std::stable_sort(hunks.begin(), hunks.end(), [](const Hunk& a, const Hunk& b) { return a.old_start < b.old_start; });
    return hunks;
}

std::string apply_hunks(std::string_view before, const std::vector<Hunk>& hunks)
{
    const Lines old = split_content(before);
    std::vector<std::string> out;
    bool final_newline = old.final_newline;
    std::size_t cursor = 0; // index of next unconsumed old line

    for (const auto& h : hunks) {
        std::size_t first = h.old_len == 0 ? h.old_start : h.old_start - 1;
        if (h.old_len > 0 && h.old_start == 0)
            throw Error(ErrorCode::LineCountMismatch, "hunk with lines cannot start at line 0");
        if (first < cursor || first > old.lines.size())
            throw Error(ErrorCode::LineCountMismatch, "hunk @@ -" + std::to_string(h.old_start) + " out of order or range");
        out.insert(out.end(), old.lines.begin() + static_cast<std::ptrdiff_t>(cursor),
                   old.lines.begin() + static_cast<std::ptrdiff_t>(first));
        cursor = first;

        const HunkLine* last_new = nullptr;
        for (const auto& l : h.lines) {
            if (l.kind != HunkLineKind::Added) {
                if (cursor >= old.lines.size() || old.lines[cursor] != l.text)
                    throw Error(ErrorCode::LineCountMismatch,
                                "hunk @@ -" + std::to_string(h.old_start) + ": old line " + std::to_string(cursor + 1) +
                                    " does not match");
                ++cursor;
            }
            if (l.kind != HunkLineKind::Removed) {
                out.push_back(l.text);
                last_new = &l;
            }
        }
        if (cursor == old.lines.size()) {
            // Hunk reaches the end of the old file, so it decides the new ending.
            if (last_new)
                final_newline = !last_new->no_newline_at_eof;
            else if (!out.empty())
                final_newline = true;
        }
    }
    out.insert(out.end(), old.lines.begin() + static_cast<std::ptrdiff_t>(cursor), old.lines.end());

    std::string result;
    for (std::size_t i = 0; i < out.size(); ++i) {
        result += out[i];
        if (i + 1 < out.size() || final_newline)
            result += '\n';
    }
    return result;
}

} // namespace automesc::miner
