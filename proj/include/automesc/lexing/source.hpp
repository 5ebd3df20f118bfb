#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "automesc/core/types.hpp"

namespace automesc::lexing {

struct SourceFile {
    std::string path;
    Language language = Language::Solidity;
    std::string content;

    std::size_t line_count() const;

    // Derives the language from the extension; throws Error(ParseError) for
    // paths that are neither .sol nor .vy.
    static SourceFile from_path(std::string path, std::string content);
};

enum class SegmentKind { Code, String, LineComment, BlockComment, Docstring };

struct Segment {
    SegmentKind kind;
    std::size_t begin; // byte offsets into the content, half-open
    std::size_t end;
};

struct LexResult {
    std::vector<Segment> segments; // contiguous, covering the whole input
    bool unterminated_block_comment = false;
};

// Solidity: // and /* */ comments, "..." and '...' strings with backslash
// escapes. Vyper: # comments, single and triple quoted strings; a triple
// quoted string standing alone on its line is classified as a docstring.
LexResult lex(std::string_view content, Language language);

// Copy of `content` in which every comment and string byte except '\n' is
// replaced by a space, so structural scanning never sees their contents.
std::string mask_non_code(std::string_view content, const LexResult& lexed);

struct StrippedSource {
    std::string content;
    // line_map[i] is the 1-based original line of stripped line i.
    std::vector<std::size_t> line_map;
    std::vector<std::string> warnings;
};

// Removes comments (and Vyper docstrings), trailing whitespace and blank
// lines. String literals are kept verbatim, including lines inside multi-line
// strings. An unterminated block comment is reported as a warning and
// stripped to end of file.
StrippedSource strip(const SourceFile& file);

enum class MethodKind { Function, Constructor, Modifier, Fallback, Def };

std::string_view to_string(MethodKind kind);

struct MethodSpan {
    std::string name;
    std::size_t start_line = 0; // 1-based, inclusive
    std::size_t end_line = 0;
    MethodKind kind = MethodKind::Function;

    bool contains(std::size_t line) const { return line >= start_line && line <= end_line; }
    friend bool operator==(const MethodSpan&, const MethodSpan&) = default;
};

struct MethodExtraction {
    std::vector<MethodSpan> spans; // ordered by start_line
    std::vector<std::string> warnings;
};

// Lexical method boundaries. Solidity: function/constructor/modifier/fallback/
// receive headers with brace-balanced bodies. Vyper: `def` headers with an
// indentation-delimited body. Body-less declarations span only the header
// line. A body with unbalanced braces is dropped with an UnbalancedBraces
// warning.
MethodExtraction extract_methods(const SourceFile& file);

} // namespace automesc::lexing
