#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>

namespace automesc::pipeline {

/// Resume state between runs. Cursors only move forward: an advance to an
/// older value is ignored.
struct RunLedger {
    // Newest repository creation time discovered, per language name.
    std::map<std::string, std::string> github_cursors;
    // Committer time of the newest commit processed, per repo_id.
    std::map<std::int64_t, std::int64_t> repo_cursors;
    // Newest lastModifiedDate ingested from NVD.
    std::optional<std::string> nvd_watermark;
    std::optional<std::string> last_run_at;
    bool in_progress = false;

    void advance_github(const std::string& language, const std::string& cursor);
    void advance_repo(std::int64_t repo_id, std::int64_t epoch);
    void advance_nvd(const std::string& watermark);

    // A missing file is an empty ledger. Throws Error(ConfigError) when the
    // file exists but is not a ledger.
    static RunLedger load(const std::string& path);
    // Written to a temporary file and renamed into place.
    void save(const std::string& path) const;
};

/// Exclusive advisory lock on "<ledger>.lock", held for the object's lifetime.
/// Throws Error(AlreadyRunning) when another process holds it.
class LedgerLock {
public:
    explicit LedgerLock(const std::string& ledger_path);
    ~LedgerLock();
    LedgerLock(const LedgerLock&) = delete;
    LedgerLock& operator=(const LedgerLock&) = delete;

private:
    int fd_ = -1;
};

} // namespace automesc::pipeline
