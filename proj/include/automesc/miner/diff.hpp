#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace automesc::miner {

enum class HunkLineKind { Context, Removed, Added };

struct HunkLine {
    HunkLineKind kind;
    std::string text;
    bool no_newline_at_eof = false; // followed by "\ No newline at end of file"
};

/// One "@@ -old_start,old_len +new_start,new_len @@" block. For a zero-length
/// side the start is the line after which the change applies (0 = before the
/// first line), as git emits it.
struct Hunk {
    std::size_t old_start = 0;
    std::size_t old_len = 0;
    std::size_t new_start = 0;
    std::size_t new_len = 0;
    std::vector<std::string> removed_lines;
    std::vector<std::string> added_lines;
    std::vector<HunkLine> lines; // body in order, context included

    // 1-based old-file line numbers of the removed lines.
    std::vector<std::size_t> removed_line_numbers() const;
    // Inclusive old-file range covered by the hunk; empty when old_len == 0.
    bool old_range_contains(std::size_t line) const
    {
        return old_len > 0 && line >= old_start && line < old_start + old_len;
    }
};

// Parses a git-style unified diff for one file. Anything before the first
// "@@" header (diff --git, index, ---/+++ lines) is ignored. Throws
// Error(MalformedHunkHeader) or Error(LineCountMismatch).
std::vector<Hunk> parse_diff(std::string_view diff);

// Applies hunks in order; context and removed lines must match `before`
// exactly. Throws Error(LineCountMismatch) when they do not.
std::string apply_hunks(std::string_view before, const std::vector<Hunk>& hunks);

} // namespace automesc::miner
