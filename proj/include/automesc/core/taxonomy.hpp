#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "automesc/core/types.hpp"

namespace automesc {

struct CanonicalVulnerability {
    std::string id;
    std::string display_name;
    std::string description;
    // "published" for rows taken from the published sample, "extrapolated" for rows
    // filled in from the tools' public detector lists.
    std::string provenance;
    std::optional<SeverityLevel> default_severity;
};

struct LabelMapping {
    ToolId tool;
    std::string raw_label;
    std::string canonical;
};

struct CapabilityRow {
    std::set<ToolId> supporting_tools;
    int threshold = 1;
    bool threshold_override = false;
};

/// Majority threshold for a type detectable by `tool_count` tools: at least
/// half of them, rounded up.
constexpr int majority_threshold(std::size_t tool_count)
{
    return static_cast<int>((tool_count + 1) / 2);
}

class DetectionCapabilityMatrix {
public:
    DetectionCapabilityMatrix() = default;
    explicit DetectionCapabilityMatrix(std::map<std::string, CapabilityRow, std::less<>> rows)
        : rows_(std::move(rows)) {}

    // Throws Error(UnknownCanonicalId).
    int threshold_for(std::string_view canonical) const;
    const CapabilityRow& row(std::string_view canonical) const;
    bool contains(std::string_view canonical) const { return rows_.find(canonical) != rows_.end(); }
    const std::map<std::string, CapabilityRow, std::less<>>& rows() const { return rows_; }

private:
    std::map<std::string, CapabilityRow, std::less<>> rows_;
};

/// Canonical vulnerability types, per-tool label mappings and the derived
/// detection-capability matrix. Immutable once loaded.
class Taxonomy {
public:
    // Parses the taxonomy document format (see docs/taxonomy.md). Errors carry
    // "<source>:<line>:<column>" positions.
    static Taxonomy parse(std::string_view text, const std::string& source_name = "<taxonomy>");
    static Taxonomy load_file(const std::string& path);
    // The document compiled into the library.
    static const Taxonomy& builtin();
    static std::string_view builtin_text();

    const std::vector<CanonicalVulnerability>& types() const { return types_; }
    const std::vector<LabelMapping>& mappings() const { return mappings_; }
    const DetectionCapabilityMatrix& matrix() const { return matrix_; }

    // Exact, case-sensitive match after trimming surrounding whitespace from
    // the raw label. nullopt means Unmapped.
    std::optional<std::string> unify_label(ToolId tool, std::string_view raw_label) const;

    int threshold_for(std::string_view canonical) const { return matrix_.threshold_for(canonical); }
    bool contains(std::string_view canonical) const { return matrix_.contains(canonical); }
    const CanonicalVulnerability& type(std::string_view canonical) const;
    std::optional<SeverityLevel> default_severity(std::string_view canonical) const;

private:
    std::vector<CanonicalVulnerability> types_;
    std::vector<LabelMapping> mappings_;
    std::map<std::pair<ToolId, std::string>, std::string, std::less<>> index_;
    std::map<std::string, std::size_t, std::less<>> type_index_;
    DetectionCapabilityMatrix matrix_;
};

} // namespace automesc
