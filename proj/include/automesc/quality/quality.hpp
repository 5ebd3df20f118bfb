#pragma once

#include <string>
#include <vector>

#include "automesc/store/export.hpp"

namespace automesc::quality {

struct QualityReport {
    std::size_t n = 0;
    double incompleteness = 0.0;
    double redundancy = 0.0;
    double inconsistency = 0.0;
    // 0-based record indices, ascending.
    std::vector<std::size_t> missing;
    std::vector<std::size_t> duplicates;
    std::vector<std::size_t> conflicting;
};

struct AssessOptions {
    std::vector<std::string> key_fields{"commit_hash", "path", "line"};
    std::string label_field = "labels";
    std::vector<std::string> required_fields{"commit_hash", "path", "labels"};
};

// Per-record indicators averaged over the dataset:
//   missing     - a required field is null or empty
//   duplicate   - every field equals an earlier record's (the later one is flagged)
//   conflicting - another record has the same key but a different label
// A record with a null key field is not located and never conflicts. An empty
// dataset scores 0 on every metric. Throws Error(UnknownField) when a named
// field is not a column.
QualityReport assess(const store::Dataset& data, const AssessOptions& options = {});

// Human-readable summary followed by one JSON line with the figures.
std::string format_report(const QualityReport& report);

} // namespace automesc::quality
