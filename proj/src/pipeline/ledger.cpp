#include "automesc/pipeline/ledger.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <filesystem>
#include <json.hpp>

#include "automesc/util/error.hpp"
#include "automesc/util/strings.hpp"

namespace automesc::pipeline {

using nlohmann::json;

void RunLedger::advance_github(const std::string& language, const std::string& cursor)
{
    auto& current = github_cursors[language];
    // ISO-8601 UTC strings of one format order lexicographically.
    if (cursor > current)
        current = cursor;
}

void RunLedger::advance_repo(std::int64_t repo_id, std::int64_t epoch)
{
    auto it = repo_cursors.find(repo_id);
    if (it == repo_cursors.end())
        repo_cursors.emplace(repo_id, epoch);
    else if (epoch > it->second)
        it->second = epoch;
}

void RunLedger::advance_nvd(const std::string& watermark)
{
    if (!nvd_watermark || watermark > *nvd_watermark)
        nvd_watermark = watermark;
}

RunLedger RunLedger::load(const std::string& path)
{
    RunLedger l;
    if (!std::filesystem::exists(path))
        return l;
    try {
        auto j = json::parse(util::read_file(path));
        const json github = j.value("github_cursors", json::object());
        const json repos = j.value("repo_cursors", json::object());
        for (const auto& [k, v] : github.items())
            l.github_cursors[k] = v.get<std::string>();
        for (const auto& [k, v] : repos.items())
            l.repo_cursors[std::stoll(k)] = v.get<std::int64_t>();
        if (j.contains("nvd_watermark") && j["nvd_watermark"].is_string())
            l.nvd_watermark = j["nvd_watermark"].get<std::string>();
        if (j.contains("last_run_at") && j["last_run_at"].is_string())
            l.last_run_at = j["last_run_at"].get<std::string>();
        l.in_progress = j.value("in_progress", false);
    } catch (const std::exception& e) {
        throw Error(ErrorCode::ConfigError, "ledger " + path + " is unreadable: " + e.what());
    }
    return l;
}

void RunLedger::save(const std::string& path) const
{
    json j;
    j["github_cursors"] = github_cursors;
    json repos = json::object();
    for (const auto& [id, epoch] : repo_cursors)
        repos[std::to_string(id)] = epoch;
    j["repo_cursors"] = repos;
    j["nvd_watermark"] = nvd_watermark ? json(*nvd_watermark) : json(nullptr);
    j["last_run_at"] = last_run_at ? json(*last_run_at) : json(nullptr);
    j["in_progress"] = in_progress;
    const std::string tmp = path + ".tmp";
    util::write_file(tmp, j.dump(2) + "\n");
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec)
        throw Error(ErrorCode::IoError, "cannot replace ledger " + path + ": " + ec.message());
}

LedgerLock::LedgerLock(const std::string& ledger_path)
{
    const std::string lock_path = ledger_path + ".lock";
    fd_ = ::open(lock_path.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644);
    if (fd_ < 0)
        throw Error(ErrorCode::IoError, "cannot open " + lock_path + ": " + std::strerror(errno));
    if (::flock(fd_, LOCK_EX | LOCK_NB) != 0) {
        const int err = errno;
        ::close(fd_);
        fd_ = -1;
        if (err == EWOULDBLOCK)
            throw Error(ErrorCode::AlreadyRunning, "another run holds " + lock_path);
        throw Error(ErrorCode::IoError, "cannot lock " + lock_path + ": " + std::strerror(err));
    }
}

LedgerLock::~LedgerLock()
{
    if (fd_ >= 0) {
        ::flock(fd_, LOCK_UN);
        ::close(fd_);
    }
}

} // namespace automesc::pipeline
