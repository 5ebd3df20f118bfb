#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "automesc/store/store.hpp"
#include "automesc/util/csv.hpp"

namespace automesc::store {

enum class ExportFormat { Csv, Jsonl };

// Throws Error(UnsupportedFormat).
ExportFormat parse_export_format(std::string_view name);
std::string_view to_string(ExportFormat format);

/// Column-ordered records; a nullopt cell is a null.
struct Dataset {
    std::vector<std::string> columns;
    std::set<std::string> integer_columns; // written as JSON numbers
    std::vector<util::CsvRow> rows;

    // Index of `column`, or nullopt.
    std::optional<std::size_t> index_of(std::string_view column) const;
};

enum class ExportTable { Pairs, Labels };

std::optional<ExportTable> parse_export_table(std::string_view name);

struct Selection {
    std::optional<Granularity> granularity;
    std::optional<std::string> commit_hash;
    // CVEs never tied to a stored commit are left out of the cve_id column
    // unless this is set.
    bool include_unlinked_cves = false;
};

// One row per pair, ordered by pair_id. Columns are listed in docs/schema.md.
Dataset query_pairs(const Store& store, const Selection& selection = {});
// One row per labeled code point (commit, path, line), ordered by those keys.
Dataset query_labels(const Store& store, const Selection& selection = {});

// CSV: a header row, then RFC-4180 rows; null is an empty unquoted field.
// JSONL: one object per row with keys in column order; null is JSON null.
std::string render(const Dataset& data, ExportFormat format);
// Inverse of render. JSON numbers are read back as their decimal text.
// Throws Error(ParseError) on malformed input.
Dataset parse_dataset(std::string_view text, ExportFormat format);

// Format implied by a file name (.csv, .jsonl, .json); throws
// Error(UnsupportedFormat) otherwise.
ExportFormat format_for_path(const std::string& path);

} // namespace automesc::store
