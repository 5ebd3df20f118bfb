#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "automesc/labeling/fusion.hpp"
#include "automesc/miner/diff.hpp"
#include "automesc/miner/model.hpp"
#include "automesc/nvd/cve.hpp"
#include "automesc/store/pairs.hpp"
#include "automesc/tools/runner.hpp"

struct sqlite3;

namespace automesc::store {

// A stored file change together with its preprocessing and labeling results.
struct StoredFileChange {
    std::int64_t id = 0;
    miner::FileChange change;
    std::optional<std::string> stripped_before;
    std::optional<std::string> stripped_after;
    std::optional<labeling::Verdict> verdict;
};

struct Stats {
    std::int64_t repo_count = 0;
    std::int64_t commit_count = 0;
    std::int64_t file_count = 0;
    std::int64_t contract_count = 0;
    std::int64_t method_count = 0;
    std::int64_t line_count = 0;
    std::int64_t cve_count = 0;
    std::int64_t vulnerability_count = 0;
    std::int64_t pair_count = 0;
    std::map<SeverityLevel, std::int64_t> severity_histogram;
    std::map<std::string, std::int64_t> type_histogram;

    // Share of labels at `level`; 0 when there are none.
    double severity_share(SeverityLevel level) const;
};

/// Relational store over a single SQLite file. Foreign keys are enforced and
/// every upsert is idempotent on the entity's natural key. One writer per
/// Store object; wrap each commit's writes in a Transaction so an interrupted
/// run never leaves a partial commit behind.
class Store {
public:
    explicit Store(const std::string& path);
    ~Store();
    Store(const Store&) = delete;
    Store& operator=(const Store&) = delete;

    class Transaction {
    public:
        explicit Transaction(Store& store);
        ~Transaction();
        void commit();

    private:
        Store& store_;
        bool done_ = false;
    };

    void upsert_repository(const miner::Repository& repo);
    void upsert_commit(const miner::Commit& commit);
    // Returns the row id. Throws Error(IntegrityViolation) for an unknown commit.
    std::int64_t upsert_file_change(const miner::FileChange& change, const std::optional<std::string>& stripped_before,
                                    const std::optional<std::string>& stripped_after);
    void set_verdict(std::int64_t file_change_id, const labeling::NoiseVerdict& verdict);
    // Replaces the hunk rows of a file change.
    void replace_line_changes(std::int64_t file_change_id, const std::vector<miner::Hunk>& hunks);

    void upsert_cve(const nvd::CveRecord& record);
    void upsert_cwe(const nvd::CweType& cwe);
    void upsert_cve_commit_link(const nvd::CveCommitLink& link);
    // Sets cve.code_linked and repository.cve_id from the stored links.
    void resolve_cve_links();

    void upsert_tool_run(const tools::ToolRun& run);
    std::optional<tools::ToolRun> find_tool_run(ToolId tool, const std::string& content_hash) const;

    // Replaces the labels and pairs of one file change.
    void replace_labels(std::int64_t file_change_id, const std::vector<labeling::LabeledFinding>& labels);
    void replace_pairs(std::int64_t file_change_id, const std::vector<VulnFixPair>& pairs);

    bool has_commit(const std::string& hash) const;
    std::optional<miner::Commit> find_commit(const std::string& hash) const;
    std::vector<StoredFileChange> file_changes(const std::string& commit_hash) const;
    // Highest CVE severity linked to the commit through a code link.
    std::optional<SeverityLevel> cve_severity_for_commit(const std::string& commit_hash) const;
    std::vector<std::string> repository_urls() const;
    // Stored repositories of one language, ordered by repo_id.
    std::vector<miner::Repository> repositories(Language language) const;

    // Row count per table.
    std::map<std::string, std::int64_t> row_counts() const;
    Stats stats() const;

    sqlite3* handle() const { return db_; }

    static const std::vector<std::string>& table_names();

private:
    void exec(const std::string& sql);
    void note_write();

    sqlite3* db_ = nullptr;
    std::int64_t writes_ = 0;
    std::int64_t fault_after_ = -1;
};

// Number of top-level `contract` declarations in Solidity source.
std::size_t count_contracts(const std::string& solidity_source);

} // namespace automesc::store
