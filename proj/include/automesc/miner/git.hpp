#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "automesc/core/types.hpp"
#include "automesc/miner/model.hpp"

namespace automesc::miner {

struct GitOptions {
    std::string git_executable = "git";
    std::string cache_dir = ".automesc-cache";
    std::size_t max_file_bytes = 1 << 20;
};

struct CommitBundle {
    Commit commit;
    std::vector<FileChange> files; // .sol/.vy only
};

struct FetchResult {
    std::vector<CommitBundle> commits; // oldest first
    std::vector<std::string> warnings;
};

/// Bare clone of one repository under the cache directory, owned exclusively
/// by the caller while in use. Reopening fetches new refs.
class GitRepository {
public:
    static GitRepository open_or_clone(const std::string& clone_url, const std::string& name, const GitOptions& options);

    const std::string& git_dir() const { return git_dir_; }

    // Commits reachable from HEAD, oldest first, with committer time >= since_epoch.
    std::vector<std::string> list_commits(std::int64_t since_epoch) const;

    // Metadata for one commit; is_merge is set from the parent count.
    Commit read_commit(const std::string& hash, std::vector<std::string>& parents) const;

    // .sol/.vy file changes against the first parent (or the empty tree).
    std::vector<FileChange> file_changes(const std::string& hash, const std::string& parent,
                                         std::vector<std::string>& warnings) const;

private:
    GitRepository(std::string git_dir, GitOptions options) : git_dir_(std::move(git_dir)), options_(std::move(options)) {}
    std::string git(const std::vector<std::string>& args, bool allow_failure = false, bool* ok = nullptr) const;

    std::string git_dir_;
    GitOptions options_;
};

// Yields keyword-matched, non-merge commits from `repo` newer than
// `since_epoch` that touch at least one .sol/.vy file. Throws
// Error(CloneFailure) when the repository cannot be cloned; unreadable blobs
// drop the affected file change with a MissingBlob warning.
FetchResult fetch_security_commits(const Repository& repo, const KeywordRuleSet& rules, std::int64_t since_epoch,
                                   const GitOptions& options);

// Parses "YYYY-MM-DDTHH:MM:SS(Z|+HH:MM)" into seconds since the epoch.
std::int64_t parse_iso8601(const std::string& timestamp);
std::string format_iso8601_utc(std::int64_t epoch);

bool is_valid_utf8(std::string_view s);

} // namespace automesc::miner
