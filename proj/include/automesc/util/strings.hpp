#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace automesc::util {

std::string_view trim(std::string_view s);
std::string to_lower(std::string_view s);
bool starts_with_ci(std::string_view s, std::string_view prefix);
bool ends_with(std::string_view s, std::string_view suffix);

std::vector<std::string> split(std::string_view s, char sep);

// Splits on '\n'. A trailing newline does not produce an empty final element.
std::vector<std::string> split_lines(std::string_view s);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

bool is_word_char(char c);

// Case-insensitive search for `needle` bounded by non-word characters (or the
// ends of `haystack`) on both sides, mirroring the regex \bneedle\b.
bool contains_word_ci(std::string_view haystack, std::string_view needle);

bool is_hex40(std::string_view s);

std::optional<std::int64_t> parse_int(std::string_view s);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);

} // namespace automesc::util
