#include "automesc/lexing/source.hpp"

#include <algorithm>

#include "automesc/util/error.hpp"
#include "automesc/util/strings.hpp"

namespace automesc::lexing {

std::size_t SourceFile::line_count() const
{
    return util::split_lines(content).size();
}

SourceFile SourceFile::from_path(std::string path, std::string content)
{
    auto language = language_for_path(path);
    if (!language)
        throw Error(ErrorCode::ParseError, "not a Solidity or Vyper source: " + path);
    return SourceFile{std::move(path), *language, std::move(content)};
}

namespace {

class Lexer {
public:
    Lexer(std::string_view src, Language lang) : src_(src), lang_(lang) {}

    LexResult run()
    {
        std::size_t code_start = 0;
        while (pos_ < src_.size()) {
            std::size_t start = pos_;
            SegmentKind kind;
            if (!scan_special(kind)) {
                ++pos_;
                continue;
            }
            if (start > code_start)
                result_.segments.push_back({SegmentKind::Code, code_start, start});
            result_.segments.push_back({kind, start, pos_});
            code_start = pos_;
        }
        if (src_.size() > code_start)
            result_.segments.push_back({SegmentKind::Code, code_start, src_.size()});
        return std::move(result_);
    }

private:
    char at(std::size_t i) const { return i < src_.size() ? src_[i] : '\0'; }

    // On a comment or string opener at pos_, consumes it and returns true.
    bool scan_special(SegmentKind& kind)
    {
        char c = src_[pos_];
        if (lang_ == Language::Solidity) {
            if (c == '/' && at(pos_ + 1) == '/') {
                kind = SegmentKind::LineComment;
                skip_to_eol();
                return true;
            }
            if (c == '/' && at(pos_ + 1) == '*') {
                kind = SegmentKind::BlockComment;
                auto close = src_.find("*/", pos_ + 2);
                if (close == std::string_view::npos) {
                    result_.unterminated_block_comment = true;
                    pos_ = src_.size();
                } else {
                    pos_ = close + 2;
                }
                return true;
            }
            if (c == '"' || c == '\'') {
                kind = SegmentKind::String;
                scan_quoted(c);
                return true;
            }
            return false;
        }

        if (c == '#') {
            kind = SegmentKind::LineComment;
            skip_to_eol();
            return true;
        }
        if (c == '"' || c == '\'') {
            bool triple = at(pos_ + 1) == c && at(pos_ + 2) == c;
            std::size_t start = pos_;
            if (triple) {
                scan_triple(c);
                kind = standalone(start, pos_) ? SegmentKind::Docstring : SegmentKind::String;
            } else {
                scan_quoted(c);
                kind = SegmentKind::String;
            }
            return true;
        }
        return false;
    }

    void skip_to_eol()
    {
        auto nl = src_.find('\n', pos_);
        pos_ = nl == std::string_view::npos ? src_.size() : nl;
    }

    // Single-line string; an unescaped newline ends it.
    void scan_quoted(char quote)
    {
        ++pos_;
        while (pos_ < src_.size()) {
            char c = src_[pos_];
            if (c == '\\' && pos_ + 1 < src_.size() && src_[pos_ + 1] != '\n') {
                pos_ += 2;
                continue;
            }
            if (c == '\n')
                return;
            ++pos_;
            if (c == quote)
                return;
        }
    }

    void scan_triple(char quote)
    {
        pos_ += 3;
        const char closer[] = {quote, quote, quote, '\0'};
        while (pos_ < src_.size()) {
            if (src_[pos_] == '\\') {
                pos_ += 2;
                continue;
            }
            if (src_.compare(pos_, 3, closer) == 0) {
                pos_ += 3;
                return;
            }
            ++pos_;
        }
        pos_ = src_.size();
    }

    // Only whitespace before `begin` on its line, and only whitespace or a
    // comment after `end` on its line.
    bool standalone(std::size_t begin, std::size_t end) const
    {
        for (std::size_t i = begin; i > 0; --i) {
            char c = src_[i - 1];
            if (c == '\n')
                break;
            if (c != ' ' && c != '\t')
                return false;
        }
        for (std::size_t i = end; i < src_.size(); ++i) {
            char c = src_[i];
            if (c == '\n' || c == '#')
                break;
            if (c != ' ' && c != '\t' && c != '\r')
                return false;
        }
        return true;
    }

    std::string_view src_;
    Language lang_;
    std::size_t pos_ = 0;
    LexResult result_;
};

bool is_blank(std::string_view s)
{
    return util::trim(s).empty();
}

std::string_view rtrim(std::string_view s)
{
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r' || s.back() == '\f' || s.back() == '\v'))
        s.remove_suffix(1);
    return s;
}

} // namespace

LexResult lex(std::string_view content, Language language)
{
    return Lexer(content, language).run();
}

std::string mask_non_code(std::string_view content, const LexResult& lexed)
{
    std::string out(content);
    for (const auto& seg : lexed.segments) {
        if (seg.kind == SegmentKind::Code)
            continue;
        for (std::size_t i = seg.begin; i < seg.end; ++i)
            if (out[i] != '\n')
                out[i] = ' ';
    }
    return out;
}

StrippedSource strip(const SourceFile& file)
{
    const std::string_view src = file.content;
    const LexResult lexed = lex(src, file.language);

    StrippedSource result;
    if (lexed.unterminated_block_comment)
        result.warnings.push_back("UnterminatedBlockComment: " + file.path);

    std::string line;
    std::size_t original_line = 1;
    std::size_t line_start_original = 1;
    bool starts_in_string = false;
    bool ends_in_string = false;
    bool pending = false; // line has received any input

    auto flush = [&] {
        std::string_view text = line;
        if (!ends_in_string)
            text = rtrim(text);
        bool keep = starts_in_string || ends_in_string || !is_blank(text);
        if (keep) {
            result.content.append(text);
            result.content.push_back('\n');
            result.line_map.push_back(line_start_original);
        }
        line.clear();
        pending = false;
    };

    for (const auto& seg : lexed.segments) {
        const bool verbatim = seg.kind == SegmentKind::Code || seg.kind == SegmentKind::String;
        const bool in_string = seg.kind == SegmentKind::String;
        bool emitted_separator = false;
        for (std::size_t i = seg.begin; i < seg.end; ++i) {
            char c = src[i];
            if (!pending) {
                pending = true;
                line_start_original = original_line;
                starts_in_string = in_string && i != seg.begin;
            }
            if (c == '\n') {
                ends_in_string = in_string;
                flush();
                ++original_line;
                emitted_separator = false;
                continue;
            }
            if (verbatim) {
                line.push_back(c);
            } else if (!emitted_separator && seg.kind == SegmentKind::BlockComment) {
                // Keep tokens on either side of an inline comment apart.
                if (!line.empty() && line.back() != ' ' && line.back() != '\t')
                    line.push_back(' ');
                emitted_separator = true;
            }
        }
    }
    if (pending) {
        ends_in_string = false;
        flush();
    }
    return result;
}

} // namespace automesc::lexing
