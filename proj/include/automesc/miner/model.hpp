#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "automesc/core/types.hpp"

namespace automesc::miner {

struct Repository {
    std::int64_t repo_id = 0;
    std::string name;
    std::string full_name; // owner/name
    std::string description;
    std::string homepage;
    std::string date_created; // ISO-8601 UTC
    std::string owner;
    std::string date_last_push;
    Language repo_language = Language::Solidity;
    std::int64_t fork_count = 0;
    std::string clone_url;
    std::optional<std::string> cve_id;
};

struct Commit {
    std::string hash;
    std::int64_t repo_id = 0;
    std::string author;
    std::string author_date;     // ISO-8601 with the author's offset
    std::string author_timezone; // "+02:00"
    std::string committer;
    std::string committer_date;
    std::string committer_timezone;
    std::int64_t committer_epoch = 0;
    std::string msg;
    std::optional<double> dmm_unit_size; // stored as given, never computed
    bool is_merge = false;
    std::vector<std::string> matched_keywords;
};

enum class ChangeType { Added, Modified, Deleted, Renamed };

std::string_view to_string(ChangeType type);
std::optional<ChangeType> parse_change_type(std::string_view s);

struct FileChange {
    std::string commit_hash;
    std::string path;
    std::optional<std::string> old_path; // set for renames
    ChangeType change_type = ChangeType::Modified;
    std::optional<std::string> code_before; // absent iff added
    std::optional<std::string> code_after;  // absent iff deleted
    std::string diff;                       // hunks only, starting at the first "@@"
};

} // namespace automesc::miner
