#include "automesc/util/strings.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "automesc/util/error.hpp"

namespace automesc {

std::string_view to_string(ErrorCode code)
{
    switch (code) {
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::DuplicateMapping: return "DuplicateMapping";
    case ErrorCode::UnknownTool: return "UnknownTool";
    case ErrorCode::DanglingCanonicalId: return "DanglingCanonicalId";
    case ErrorCode::ThresholdMismatch: return "ThresholdMismatch";
    case ErrorCode::UnknownCanonicalId: return "UnknownCanonicalId";
    case ErrorCode::RateLimited: return "RateLimited";
    case ErrorCode::AuthFailure: return "AuthFailure";
    case ErrorCode::NetworkError: return "NetworkError";
    case ErrorCode::CloneFailure: return "CloneFailure";
    case ErrorCode::MissingBlob: return "MissingBlob";
    case ErrorCode::MalformedHunkHeader: return "MalformedHunkHeader";
    case ErrorCode::LineCountMismatch: return "LineCountMismatch";
    case ErrorCode::ChecksumMismatch: return "ChecksumMismatch";
    case ErrorCode::SchemaMismatch: return "SchemaMismatch";
    case ErrorCode::ImageMissing: return "ImageMissing";
    case ErrorCode::FixtureMissing: return "FixtureMissing";
    case ErrorCode::UnparseableOutput: return "UnparseableOutput";
    case ErrorCode::IntegrityViolation: return "IntegrityViolation";
    case ErrorCode::UnsupportedFormat: return "UnsupportedFormat";
    case ErrorCode::StoreError: return "StoreError";
    case ErrorCode::UnknownField: return "UnknownField";
    case ErrorCode::AlreadyRunning: return "AlreadyRunning";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

} // namespace automesc

namespace automesc::util {

std::string_view trim(std::string_view s)
{
    auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v'; };
    while (!s.empty() && is_space(s.front()))
        s.remove_prefix(1);
    while (!s.empty() && is_space(s.back()))
        s.remove_suffix(1);
    return s;
}

std::string to_lower(std::string_view s)
{
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

bool starts_with_ci(std::string_view s, std::string_view prefix)
{
    if (s.size() < prefix.size())
        return false;
    return to_lower(s.substr(0, prefix.size())) == to_lower(prefix);
}

bool ends_with(std::string_view s, std::string_view suffix)
{
    return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

std::vector<std::string> split(std::string_view s, char sep)
{
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        auto pos = s.find(sep, start);
        if (pos == std::string_view::npos) {
            out.emplace_back(s.substr(start));
            break;
        }
        out.emplace_back(s.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

std::vector<std::string> split_lines(std::string_view s)
{
    std::vector<std::string> out;
    if (s.empty())
        return out;
    std::size_t start = 0;
    while (start < s.size()) {
        auto pos = s.find('\n', start);
        if (pos == std::string_view::npos) {
            out.emplace_back(s.substr(start));
            break;
        }
        out.emplace_back(s.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

std::string join(const std::vector<std::string>& parts, std::string_view sep)
{
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i)
            out += sep;
        out += parts[i];
    }
    return out;
}

bool is_word_char(char c)
{
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

bool contains_word_ci(std::string_view haystack, std::string_view needle)
{
    if (needle.empty() || haystack.size() < needle.size())
        return false;
    const std::string hay = to_lower(haystack);
    const std::string pat = to_lower(needle);
    std::size_t pos = 0;
    while ((pos = hay.find(pat, pos)) != std::string::npos) {
        // \b only asserts a boundary where the adjacent pattern char is a word char.
        bool left_ok = pos == 0 || !is_word_char(pat.front()) || !is_word_char(hay[pos - 1]);
        std::size_t end = pos + pat.size();
        bool right_ok = end == hay.size() || !is_word_char(pat.back()) || !is_word_char(hay[end]);
        if (left_ok && right_ok)
            return true;
        ++pos;
    }
    return false;
}

bool is_hex40(std::string_view s)
{
    return s.size() == 40 && std::all_of(s.begin(), s.end(), [](char c) {
        return std::isxdigit(static_cast<unsigned char>(c));
    });
}

std::optional<std::int64_t> parse_int(std::string_view s)
{
    s = trim(s);
    std::int64_t value = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
        return std::nullopt;
    return value;
}

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorCode::IoError, "cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, std::string_view content)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw Error(ErrorCode::IoError, "cannot write " + path);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
}

} // namespace automesc::util
