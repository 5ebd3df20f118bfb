#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "automesc/core/taxonomy.hpp"
#include "automesc/tools/adapters.hpp"

namespace automesc::labeling {

struct LabeledFinding {
    std::string canonical;
    std::string path;
    std::size_t line = 0; // 0 = file-scoped
    std::set<ToolId> supporting_tools;
    int vote_count = 0;
    int threshold_used = 0;
    std::optional<SeverityLevel> severity;

    friend bool operator==(const LabeledFinding&, const LabeledFinding&) = default;
};

struct FuseOptions {
    // Findings of one type whose lines differ by at most this much vote
    // together. 0 is exact-line matching. File-scoped findings (line 0) only
    // ever vote with other file-scoped findings.
    std::size_t position_window = 0;
};

// Majority vote. Raw findings are unified against the taxonomy; Unmapped ones
// never vote. A (type, line) group is labeled when its distinct tools reach
// the type's threshold. Output is sorted by (line, canonical id) and does not
// depend on input order.
//
// With a window k > 0 the anchor lines are the lines some finding of the type
// reports; a group at anchor L collects the tools reporting that type within
// [L-k, L+k]. Overlapping anchors that reach the threshold are all reported.
std::vector<LabeledFinding> fuse(const std::vector<tools::RawFinding>& findings, const Taxonomy& taxonomy,
                                 const FuseOptions& options = {});

enum class Verdict { GenuineFix, Noise };

std::string_view to_string(Verdict verdict);
std::optional<Verdict> parse_verdict(std::string_view s);

struct NoiseVerdict {
    std::string commit_hash;
    std::string path;
    Verdict verdict = Verdict::GenuineFix;
    // Post-fix labels whose type was already labeled before the fix.
    std::vector<LabeledFinding> evidence;
    // Post-fix labels of types not present before the fix.
    std::vector<LabeledFinding> residual;
};

// Noise iff the fixed version still carries a labeled type that the
// vulnerable version of the same file carried, regardless of line.
NoiseVerdict filter_noise(const std::string& commit_hash, const std::string& path,
                          const std::vector<LabeledFinding>& pre_fix_labels,
                          const std::vector<tools::RawFinding>& post_fix_findings, const Taxonomy& taxonomy,
                          const FuseOptions& options = {});

// CVE severity when the commit is linked to one, else the type's default,
// else Low.
LabeledFinding attach_severity(LabeledFinding label, std::optional<SeverityLevel> cve_severity,
                               const Taxonomy& taxonomy);

} // namespace automesc::labeling
