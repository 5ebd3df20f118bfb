#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace automesc::util {

// A CSV field: nullopt encodes a null, written as an empty unquoted field.
// An empty string is written as "" so the two stay distinguishable on re-read.
using CsvField = std::optional<std::string>;
using CsvRow = std::vector<CsvField>;

std::string csv_encode_row(const CsvRow& row);

// RFC-4180 reader: quoted fields may contain separators, quotes ("") and
// newlines. Rows are terminated by "\n" or "\r\n". Throws Error(ParseError) on
// an unterminated quote.
std::vector<CsvRow> csv_parse(std::string_view text);

} // namespace automesc::util
