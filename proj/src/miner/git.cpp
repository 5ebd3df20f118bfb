#include "automesc/miner/git.hpp"

#include <cstdio>
#include <ctime>
#include <filesystem>

#include "automesc/miner/keywords.hpp"
#include "automesc/util/error.hpp"
#include "automesc/util/process.hpp"
#include "automesc/util/strings.hpp"

namespace automesc::miner {

namespace fs = std::filesystem;

namespace {

constexpr const char* kEmptyTree = "4b825dc642cb6eb9a060e54bf8d69288fbee4904";

std::string timezone_of(const std::string& iso)
{
    if (!iso.empty() && iso.back() == 'Z')
        return "+00:00";
    if (iso.size() >= 6) {
        auto tz = iso.substr(iso.size() - 6);
        if ((tz[0] == '+' || tz[0] == '-') && tz[3] == ':')
            return tz;
    }
    return {};
}

} // namespace

std::int64_t parse_iso8601(const std::string& ts)
{
    std::tm tm{};
    int y, mo, d, h = 0, mi = 0, s = 0;
    if (std::sscanf(ts.c_str(), "%d-%d-%dT%d:%d:%d", &y, &mo, &d, &h, &mi, &s) < 3)
        throw Error(ErrorCode::ParseError, "bad timestamp '" + ts + "'");
    tm.tm_year = y - 1900;
    tm.tm_mon = mo - 1;
    tm.tm_mday = d;
    tm.tm_hour = h;
    tm.tm_min = mi;
    tm.tm_sec = s;
    std::int64_t epoch = timegm(&tm);
    auto tz = timezone_of(ts);
    if (!tz.empty() && tz != "+00:00") {
        int sign = tz[0] == '-' ? -1 : 1;
        int off = std::stoi(tz.substr(1, 2)) * 3600 + std::stoi(tz.substr(4, 2)) * 60;
        epoch -= sign * off;
    }
    return epoch;
}

std::string format_iso8601_utc(std::int64_t epoch)
{
    std::time_t t = static_cast<std::time_t>(epoch);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

bool is_valid_utf8(std::string_view s)
{
    std::size_t i = 0;
    while (i < s.size()) {
        auto c = static_cast<unsigned char>(s[i]);
        std::size_t n;
        if (c < 0x80)
            n = 0;
        else if ((c & 0xe0) == 0xc0 && c >= 0xc2)
            n = 1;
        else if ((c & 0xf0) == 0xe0)
            n = 2;
        else if ((c & 0xf8) == 0xf0 && c <= 0xf4)
            n = 3;
        else
            return false;
        for (std::size_t k = 1; k <= n; ++k) {
            if (i + k >= s.size() || (static_cast<unsigned char>(s[i + k]) & 0xc0) != 0x80)
                return false;
        }
        i += n + 1;
    }
    return true;
}

std::string GitRepository::git(const std::vector<std::string>& args, bool allow_failure, bool* ok) const
{
    std::vector<std::string> argv{options_.git_executable, "--git-dir=" + git_dir_};
    argv.insert(argv.end(), args.begin(), args.end());
    util::ProcessOptions po;
    po.env = {"GIT_TERMINAL_PROMPT=0", "LC_ALL=C"};
    auto res = util::run_process(argv, po);
    if (ok)
        *ok = res.exit_code == 0;
    if (res.exit_code != 0 && !allow_failure)
        throw Error(ErrorCode::IoError, "git " + (args.empty() ? std::string{} : args[0]) + " failed: " + res.err);
    return res.out;
}

GitRepository GitRepository::open_or_clone(const std::string& clone_url, const std::string& name, const GitOptions& options)
{
    fs::create_directories(options.cache_dir);
    const std::string dir = (fs::path(options.cache_dir) / (name + ".git")).string();
    util::ProcessOptions po;
    po.env = {"GIT_TERMINAL_PROMPT=0", "LC_ALL=C"};
    if (!fs::exists(fs::path(dir) / "HEAD")) {
        fs::remove_all(dir);
        auto res = util::run_process({options.git_executable, "clone", "--bare", "--quiet", clone_url, dir}, po);
        if (res.exit_code != 0) {
            fs::remove_all(dir);
            throw Error(ErrorCode::CloneFailure, clone_url + ": " + std::string(util::trim(res.err)));
        }
    } else {
        auto res = util::run_process({options.git_executable, "--git-dir=" + dir, "fetch", "--quiet", "--force", clone_url,
                                      "+refs/heads/*:refs/heads/*"},
                                     po);
        if (res.exit_code != 0)
            throw Error(ErrorCode::CloneFailure, clone_url + ": fetch failed: " + std::string(util::trim(res.err)));
    }
    return GitRepository(dir, options);
}

std::vector<std::string> GitRepository::list_commits(std::int64_t since_epoch) const
{
    bool ok = false;
    auto out = git({"rev-list", "--reverse", "--topo-order", "--format=%H %ct", "HEAD"}, true, &ok);
    std::vector<std::string> hashes;
    if (!ok)
        return hashes; // empty repository
    for (const auto& line : util::split_lines(out)) {
        if (line.rfind("commit ", 0) == 0)
            continue;
        auto parts = util::split(line, ' ');
        if (parts.size() != 2)
            continue;
        auto ts = util::parse_int(parts[1]);
        if (ts && *ts >= since_epoch)
            hashes.push_back(parts[0]);
    }
    return hashes;
}

Commit GitRepository::read_commit(const std::string& hash, std::vector<std::string>& parents) const
{
    auto out = git({"show", "-s", "--format=%H%x00%P%x00%an%x00%aI%x00%cn%x00%cI%x00%ct%x00%B", hash});
    auto fields = util::split(out, '\0');
    if (fields.size() < 8)
        throw Error(ErrorCode::IoError, "unexpected git show output for " + hash);
    Commit c;
    c.hash = fields[0];
    parents.clear();
    for (auto& p : util::split(fields[1], ' '))
        if (!p.empty())
            parents.push_back(p);
    c.author = fields[2];
    c.author_date = fields[3];
    c.author_timezone = timezone_of(fields[3]);
    c.committer = fields[4];
    c.committer_date = fields[5];
    c.committer_timezone = timezone_of(fields[5]);
    c.committer_epoch = util::parse_int(fields[6]).value_or(0);
    std::string msg = fields[7];
    for (std::size_t i = 8; i < fields.size(); ++i)
        msg += fields[i];
    while (!msg.empty() && msg.back() == '\n')
        msg.pop_back();
    c.msg = msg;
    c.is_merge = parents.size() > 1;
    return c;
}

std::vector<FileChange> GitRepository::file_changes(const std::string& hash, const std::string& parent,
                                                   std::vector<std::string>& warnings) const
{
    const std::string base = parent.empty() ? kEmptyTree : parent;
    auto out = git({"diff-tree", "-r", "-M", "--no-commit-id", "--name-status", "-z", base, hash});
    auto tokens = util::split(out, '\0');

    std::vector<FileChange> changes;
    for (std::size_t i = 0; i < tokens.size();) {
        const std::string status = tokens[i++];
        if (status.empty())
            continue;
        FileChange fc;
        fc.commit_hash = hash;
        std::string old_path;
        switch (status[0]) {
        case 'A': fc.change_type = ChangeType::Added; break;
        case 'M': fc.change_type = ChangeType::Modified; break;
        case 'D': fc.change_type = ChangeType::Deleted; break;
        case 'R': fc.change_type = ChangeType::Renamed; break;
        default:
            // Copies and type changes are not tracked.
            i += status[0] == 'C' ? 2 : 1;
            continue;
        }
        if (fc.change_type == ChangeType::Renamed) {
            if (i + 1 >= tokens.size())
                break;
            old_path = tokens[i++];
            fc.path = tokens[i++];
            fc.old_path = old_path;
        } else {
            if (i >= tokens.size())
                break;
            fc.path = tokens[i++];
            old_path = fc.path;
        }
        if (!language_for_path(fc.path) && !language_for_path(old_path))
            continue;

        auto read_blob = [&](const std::string& rev, const std::string& path) -> std::optional<std::string> {
            bool ok = false;
            auto size = git({"cat-file", "-s", rev + ":" + path}, true, &ok);
            if (!ok) {
                warnings.push_back("MissingBlob: " + rev + ":" + path);
                return std::nullopt;
            }
            if (static_cast<std::size_t>(util::parse_int(size).value_or(0)) > options_.max_file_bytes) {
                warnings.push_back("FileTooLarge: " + rev + ":" + path);
                return std::nullopt;
            }
            auto blob = git({"cat-file", "blob", rev + ":" + path}, true, &ok);
            if (!ok) {
                warnings.push_back("MissingBlob: " + rev + ":" + path);
                return std::nullopt;
            }
            if (!is_valid_utf8(blob)) {
                warnings.push_back("NonUtf8: " + rev + ":" + path);
                return std::nullopt;
            }
            return blob;
        };

        if (fc.change_type != ChangeType::Added) {
            fc.code_before = read_blob(base, old_path);
            if (!fc.code_before)
                continue;
        }
        if (fc.change_type != ChangeType::Deleted) {
            fc.code_after = read_blob(hash, fc.path);
            if (!fc.code_after)
                continue;
        }

        std::vector<std::string> diff_args{"diff", "--no-color", "--no-ext-diff", "-M", base, hash, "--"};
        if (old_path != fc.path)
            diff_args.push_back(old_path);
        diff_args.push_back(fc.path);
        auto diff = git(diff_args);
        auto at = diff.find("\n@@");
        fc.diff = diff.rfind("@@", 0) == 0 ? diff : (at == std::string::npos ? std::string{} : diff.substr(at + 1));
        if (fc.change_type == ChangeType::Modified && fc.diff.empty())
            continue; // mode-only change
        changes.push_back(std::move(fc));
    }
    return changes;
}

FetchResult fetch_security_commits(const Repository& repo, const KeywordRuleSet& rules, std::int64_t since_epoch,
                                   const GitOptions& options)
{
    FetchResult result;
    auto git_repo = GitRepository::open_or_clone(repo.clone_url, std::to_string(repo.repo_id), options);
    for (const auto& hash : git_repo.list_commits(since_epoch)) {
        std::vector<std::string> parents;
        Commit commit = git_repo.read_commit(hash, parents);
        if (commit.is_merge)
            continue;
        auto match = match_commit(commit.msg, rules, true);
        if (!match.matched)
            continue;
        commit.repo_id = repo.repo_id;
        commit.matched_keywords = match.keywords;
        auto files = git_repo.file_changes(hash, parents.empty() ? std::string{} : parents[0], result.warnings);
        if (files.empty())
            continue;
        result.commits.push_back({std::move(commit), std::move(files)});
    }
    return result;
}

} // namespace automesc::miner
