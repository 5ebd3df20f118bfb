#pragma once

#include <chrono>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "automesc/miner/model.hpp"

namespace automesc::miner {

struct RepoPage {
    std::vector<Repository> items;
    std::optional<std::string> next_page; // opaque token; nullopt on the last page
};

/// Repository search. `since` is an ISO-8601 timestamp; repositories created
/// earlier are excluded. Results are ordered by creation time.
class GitHubClient {
public:
    virtual ~GitHubClient() = default;
    virtual RepoPage search_repositories(Language language, const std::string& since, const std::string& page_token) = 0;
};

/// Serves repositories from a JSON manifest (see docs/fixtures.md). Relative
/// clone_url values resolve against the manifest's directory.
class FixtureGitHubClient : public GitHubClient {
public:
    explicit FixtureGitHubClient(const std::string& manifest_path);
    RepoPage search_repositories(Language language, const std::string& since, const std::string& page_token) override;

private:
    std::vector<Repository> repos_;
    std::size_t page_size_ = 100;
};

struct RetryPolicy {
    int max_retries = 5;
    std::chrono::milliseconds initial_backoff{1000};
    std::chrono::milliseconds max_backoff{std::chrono::minutes(15)};
};

using Sleeper = std::function<void(std::chrono::milliseconds)>;

/// GitHub REST search client. Rate-limit responses (429, or 403 with
/// X-RateLimit-Remaining: 0) wait for Retry-After / X-RateLimit-Reset and
/// resume the same page; transport errors and 5xx back off exponentially up to
/// the retry limit.
class HttpGitHubClient : public GitHubClient {
public:
    HttpGitHubClient(std::string api_base, std::string token, int per_page = 100, RetryPolicy retry = {},
                     Sleeper sleeper = {});
    RepoPage search_repositories(Language language, const std::string& since, const std::string& page_token) override;

    int rate_limit_waits() const { return rate_limit_waits_; }

private:
    std::string api_base_;
    std::string token_;
    int per_page_;
    RetryPolicy retry_;
    Sleeper sleep_;
    int rate_limit_waits_ = 0;
};

struct DiscoverResult {
    std::vector<Repository> repos;
    // date_created of the newest repository yielded; resume point for the next run.
    std::optional<std::string> cursor;
};

// Paginates exhaustively. Repositories whose language differs are dropped and
// repo_ids are deduplicated within the stream. `on_repo`, when given, sees
// each repository as it is discovered.
DiscoverResult discover_repos(GitHubClient& client, Language language, const std::string& since,
                              const std::function<void(const Repository&)>& on_repo = {});

// Parses one repository object of the search API / fixture manifest.
Repository repository_from_json_text(const std::string& json_object);

} // namespace automesc::miner
