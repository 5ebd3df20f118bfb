#include "automesc/miner/github.hpp"

#include <json.hpp>

#include <algorithm>
#include <ctime>
#include <filesystem>
#include <set>
#include <thread>

#include "automesc/util/error.hpp"
#include "automesc/util/http.hpp"
#include "automesc/util/strings.hpp"

namespace automesc::miner {

using nlohmann::json;

std::string_view to_string(ChangeType type)
{
    switch (type) {
    case ChangeType::Added: return "added";
    case ChangeType::Modified: return "modified";
    case ChangeType::Deleted: return "deleted";
    case ChangeType::Renamed: return "renamed";
    }
    return "?";
}

std::optional<ChangeType> parse_change_type(std::string_view s)
{
    for (auto t : {ChangeType::Added, ChangeType::Modified, ChangeType::Deleted, ChangeType::Renamed})
        if (to_string(t) == s)
            return t;
    return std::nullopt;
}

namespace {

std::string str_or_empty(const json& j, const char* key)
{
    auto it = j.find(key);
    if (it == j.end() || it->is_null())
        return {};
    if (it->is_string())
        return it->get<std::string>();
    return it->dump();
}

Repository repo_from_json(const json& j)
{
    Repository r;
    if (!j.contains("id") || !j["id"].is_number_integer())
        throw Error(ErrorCode::SchemaMismatch, "repository without integer id");
    r.repo_id = j["id"].get<std::int64_t>();
    r.name = str_or_empty(j, "name");
    r.full_name = str_or_empty(j, "full_name");
    r.description = str_or_empty(j, "description");
    r.homepage = str_or_empty(j, "homepage");
    r.date_created = str_or_empty(j, "created_at");
    r.date_last_push = str_or_empty(j, "pushed_at");
    if (auto it = j.find("owner"); it != j.end()) {
        if (it->is_object())
            r.owner = str_or_empty(*it, "login");
        else if (it->is_string())
            r.owner = it->get<std::string>();
    }
    if (r.owner.empty() && r.full_name.find('/') != std::string::npos)
        r.owner = r.full_name.substr(0, r.full_name.find('/'));
    auto lang = parse_language(str_or_empty(j, "language"));
    if (!lang)
        throw Error(ErrorCode::SchemaMismatch, "repository " + std::to_string(r.repo_id) + " has unsupported language");
    r.repo_language = *lang;
    if (auto it = j.find("forks_count"); it != j.end() && it->is_number_integer())
        r.fork_count = it->get<std::int64_t>();
    r.clone_url = str_or_empty(j, "clone_url");
    return r;
}

} // namespace

Repository repository_from_json_text(const std::string& text)
{
    return repo_from_json(json::parse(text));
}

FixtureGitHubClient::FixtureGitHubClient(const std::string& manifest_path)
{
    json manifest;
    try {
        manifest = json::parse(util::read_file(manifest_path));
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ParseError, manifest_path + ": " + e.what());
    }
    const auto base = std::filesystem::path(manifest_path).parent_path();
    page_size_ = manifest.value("page_size", 100);
    if (page_size_ == 0)
        throw Error(ErrorCode::ParseError, manifest_path + ": page_size must be positive");
    for (const auto& j : manifest.at("repositories")) {
        Repository r = repo_from_json(j);
        if (!r.clone_url.empty() && r.clone_url.find("://") == std::string::npos &&
            !std::filesystem::path(r.clone_url).is_absolute())
            r.clone_url = (base / r.clone_url).lexically_normal().string();
        repos_.push_back(std::move(r));
    }
    std::stable_sort(repos_.begin(), repos_.end(), [](const Repository& a, const Repository& b) {
        return std::tie(a.date_created, a.repo_id) < std::tie(b.date_created, b.repo_id);
    });
}

RepoPage FixtureGitHubClient::search_repositories(Language language, const std::string& since, const std::string& page_token)
{
    std::vector<const Repository*> matching;
    for (const auto& r : repos_)
        if (r.repo_language == language && r.date_created >= since)
            matching.push_back(&r);
    std::size_t page = 0;
    if (!page_token.empty()) {
        auto p = util::parse_int(page_token);
        if (!p || *p < 0)
            throw Error(ErrorCode::ParseError, "bad page token " + page_token);
        page = static_cast<std::size_t>(*p);
    }
    RepoPage out;
    const std::size_t begin = page * page_size_;
    for (std::size_t i = begin; i < std::min(matching.size(), begin + page_size_); ++i)
        out.items.push_back(*matching[i]);
    if (begin + page_size_ < matching.size())
        out.next_page = std::to_string(page + 1);
    return out;
}

HttpGitHubClient::HttpGitHubClient(std::string api_base, std::string token, int per_page, RetryPolicy retry, Sleeper sleeper)
    : api_base_(std::move(api_base)), token_(std::move(token)), per_page_(per_page), retry_(retry),
      sleep_(sleeper ? std::move(sleeper) : Sleeper([](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); }))
{
    while (!api_base_.empty() && api_base_.back() == '/')
        api_base_.pop_back();
}

RepoPage HttpGitHubClient::search_repositories(Language language, const std::string& since, const std::string& page_token)
{
    const std::string page = page_token.empty() ? "1" : page_token;
    // GitHub search qualifiers: created:>=YYYY-MM-DDTHH:MM:SSZ
    const std::string url = api_base_ + "/search/repositories?q=language:" + std::string(to_string(language)) +
                            "+created:%3E%3D" + since + "&sort=created&order=asc&per_page=" + std::to_string(per_page_) +
                            "&page=" + page;
    std::map<std::string, std::string> headers{
        {"Accept", "application/vnd.github+json"},
        {"User-Agent", "automesc"},
    };
    if (!token_.empty())
        headers["Authorization"] = "Bearer " + token_;

    auto backoff = retry_.initial_backoff;
    int failures = 0;
    while (true) {
        util::HttpResponse res;
        try {
            res = util::http_get(url, headers);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::NetworkError || ++failures > retry_.max_retries)
                throw;
            sleep_(backoff);
            backoff = std::min(backoff * 2, retry_.max_backoff);
            continue;
        }

        if (res.status == 401)
            throw Error(ErrorCode::AuthFailure, "GitHub rejected the token (401)");
        const bool limited = res.status == 429 || (res.status == 403 && res.header("x-ratelimit-remaining") == "0");
        if (limited) {
            ++rate_limit_waits_;
            std::chrono::milliseconds wait = retry_.initial_backoff;
            if (auto ra = util::parse_int(res.header("retry-after")))
                wait = std::chrono::seconds(*ra);
            else if (auto reset = util::parse_int(res.header("x-ratelimit-reset")))
                wait = std::chrono::seconds(std::max<std::int64_t>(0, *reset - std::time(nullptr)));
            sleep_(std::min(wait, retry_.max_backoff));
            continue;
        }
        if (res.status == 403)
            throw Error(ErrorCode::AuthFailure, "GitHub refused the request (403)");
        if (res.status >= 500) {
            if (++failures > retry_.max_retries)
                throw Error(ErrorCode::NetworkError, "GitHub returned " + std::to_string(res.status));
            sleep_(backoff);
            backoff = std::min(backoff * 2, retry_.max_backoff);
            continue;
        }
        if (res.status != 200)
            throw Error(ErrorCode::NetworkError, "GitHub returned " + std::to_string(res.status));

        json body;
        try {
            body = json::parse(res.body);
        } catch (const json::exception& e) {
            throw Error(ErrorCode::SchemaMismatch, std::string("search response: ") + e.what());
        }
        RepoPage out;
        for (const auto& item : body.value("items", json::array())) {
            try {
                out.items.push_back(repo_from_json(item));
            } catch (const Error&) {
                // Repositories in other languages are not ours to keep.
            }
        }
        const auto link = res.header("link");
        const bool has_next = link.empty() ? body.value("items", json::array()).size() == static_cast<std::size_t>(per_page_)
                                           : link.find("rel=\"next\"") != std::string::npos;
        if (has_next)
            out.next_page = std::to_string(*util::parse_int(page) + 1);
        return out;
    }
}

DiscoverResult discover_repos(GitHubClient& client, Language language, const std::string& since,
                              const std::function<void(const Repository&)>& on_repo)
{
    DiscoverResult result;
    std::set<std::int64_t> seen;
    std::string token;
    while (true) {
        RepoPage page = client.search_repositories(language, since, token);
        for (auto& r : page.items) {
            if (r.repo_language != language || r.date_created < since || !seen.insert(r.repo_id).second)
                continue;
            if (!result.cursor || r.date_created > *result.cursor)
                result.cursor = r.date_created;
            if (on_repo)
                on_repo(r);
            result.repos.push_back(std::move(r));
        }
        if (!page.next_page)
            break;
        token = *page.next_page;
    }
    return result;
}

} // namespace automesc::miner
