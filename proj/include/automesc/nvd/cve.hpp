#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "automesc/core/types.hpp"

namespace automesc::nvd {

struct Cvss {
    std::string vector;
    double base_score = 0.0; // [0, 10]
};

struct CveRecord {
    std::string cve_id;
    std::string published_date;
    std::string last_modified_date;
    std::string description;
    std::optional<std::string> user_privilege;
    std::optional<std::string> user_interaction;
    std::optional<Cvss> cvss_v2;
    std::optional<Cvss> cvss_v3;
    SeverityLevel severity = SeverityLevel::Low;
    std::vector<std::string> cwe_ids;
    std::vector<std::string> reference_urls;
    // True once a reference resolved to a stored commit, or a commit-less
    // repository reference matched a stored repository.
    bool code_linked = false;
};

struct CweType {
    std::string cwe_id;
    std::string name;
    std::string description;
    std::string url;
    bool is_category = false;
};

struct CveCommitLink {
    std::string cve_id;
    std::string repo_url; // https://host/owner/repo
    std::optional<std::string> commit_hash;
};

// <4.0 Low, [4.0, 7.0) Medium, >=7.0 High. Scores are clamped to [0, 10].
SeverityLevel severity_from_score(double base_score);
// Prefers CVSS v3, falls back to v2, and to Low without any score.
SeverityLevel derive_severity(const std::optional<Cvss>& v3, const std::optional<Cvss>& v2);

bool is_cve_id(std::string_view id);

struct FilterResult {
    std::vector<CveRecord> records;
    std::vector<std::string> warnings; // one per matching entry that failed extraction
    std::size_t total_entries = 0;
    std::size_t matching_entries = 0; // == records.size() + warnings.size()
};

std::vector<std::string> default_filter_terms();

// Parses an NVD JSON 1.1 feed document ("CVE_Items"). Entries whose
// description or reference URLs contain any filter term (case-insensitive)
// are extracted; a malformed matching entry becomes a SchemaMismatch warning
// instead of aborting the feed. Throws Error(SchemaMismatch) only when the
// document itself is not a feed.
FilterResult parse_and_filter(std::string_view feed_json, const std::vector<std::string>& filter_terms);

// One record per cve_id, keeping the latest last_modified_date. Output is
// ordered by cve_id.
std::vector<CveRecord> dedupe(std::vector<CveRecord> records);

// Recognizes github.com, gitlab.com and bitbucket.org repository and commit
// URLs among the record's references.
std::vector<CveCommitLink> link_references(const CveRecord& record);

// CWE rows for the ids attached to a record. NVD's placeholder ids
// (NVD-CWE-Other, NVD-CWE-noinfo) are categories, not weakness types.
std::vector<CweType> cwe_types_for(const CveRecord& record);

} // namespace automesc::nvd
