#pragma once

#include <chrono>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "automesc/core/taxonomy.hpp"
#include "automesc/labeling/fusion.hpp"
#include "automesc/miner/git.hpp"
#include "automesc/miner/github.hpp"
#include "automesc/nvd/feeds.hpp"
#include "automesc/pipeline/config.hpp"
#include "automesc/pipeline/ledger.hpp"
#include "automesc/store/store.hpp"

namespace automesc::pipeline {

struct CycleReport {
    std::size_t repos = 0;
    std::size_t commits_ingested = 0;
    std::size_t commits_skipped = 0; // already stored
    std::size_t files = 0;
    std::size_t noise_files = 0;
    std::size_t labels = 0;
    std::size_t pairs = 0;
    std::size_t cves = 0;
    std::vector<std::string> warnings;
};

/// One discover -> fetch -> preprocess -> tools -> label -> pairs -> store
/// pass. Each commit is written in its own transaction, and commits already in
/// the store are skipped, so a rerun after a crash resumes without duplicates.
class Pipeline {
public:
    // Clients default to the ones named by the configuration.
    explicit Pipeline(PipelineConfig config);

    void set_github_client(std::unique_ptr<miner::GitHubClient> client) { github_ = std::move(client); }
    void set_feed_source(std::unique_ptr<nvd::FeedSource> source) { feeds_ = std::move(source); }

    // Cursors in `ledger` are advanced only when the whole cycle succeeds.
    CycleReport run_cycle(store::Store& store, RunLedger& ledger, Source source);

    // Reruns labeling for one stored commit and replaces its labels, verdicts
    // and pairs. Throws Error(IntegrityViolation) for an unknown commit.
    std::vector<labeling::LabeledFinding> relabel_commit(store::Store& store, const std::string& hash);

    const Taxonomy& taxonomy() const { return *taxonomy_; }
    const PipelineConfig& config() const { return config_; }

private:
    void ingest_nvd(store::Store& store, RunLedger& next, CycleReport& report);
    void ingest_github(store::Store& store, const RunLedger& current, RunLedger& next, CycleReport& report);
    void ingest_commit(store::Store& store, const miner::CommitBundle& bundle, CycleReport& report);
    // Labels, verdict and pairs for one stored file change.
    void label_file(store::Store& store, std::int64_t file_change_id, const miner::FileChange& change,
                    CycleReport& report, std::vector<labeling::LabeledFinding>* labels_out = nullptr);
    std::vector<tools::ToolRun> tool_runs(store::Store& store, const lexing::SourceFile& file);

    PipelineConfig config_;
    std::unique_ptr<Taxonomy> owned_taxonomy_;
    const Taxonomy* taxonomy_ = nullptr;
    std::unique_ptr<miner::GitHubClient> github_;
    std::unique_ptr<nvd::FeedSource> feeds_;
};

using SteadyClock = std::chrono::steady_clock;

struct ScheduleHooks {
    std::function<SteadyClock::time_point()> now = [] { return SteadyClock::now(); };
    std::function<void(SteadyClock::duration)> sleep;
    std::function<bool()> stop_requested = [] { return false; };
};

// Runs `cycle` every `interval` until stopped or `max_cycles` is reached. A
// cycle never starts earlier than one interval after the previous start; one
// that overruns is followed immediately by the next, without catch-up bursts.
// A throwing cycle is logged and the loop continues. Returns the start times.
std::vector<SteadyClock::time_point> run_schedule(SteadyClock::duration interval, const std::function<void()>& cycle,
                                                  const ScheduleHooks& hooks,
                                                  std::optional<std::size_t> max_cycles = std::nullopt);

} // namespace automesc::pipeline
