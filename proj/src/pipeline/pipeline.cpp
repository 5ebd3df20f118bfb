#include "automesc/pipeline/pipeline.hpp"

#include <algorithm>
#include <ctime>
#include <thread>

#include "automesc/lexing/source.hpp"
#include "automesc/miner/diff.hpp"
#include "automesc/nvd/cve.hpp"
#include "automesc/store/pairs.hpp"
#include "automesc/tools/adapters.hpp"
#include "automesc/util/error.hpp"
#include "automesc/util/log.hpp"

namespace automesc::pipeline {

namespace {

int current_utc_year()
{
    std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    return tm.tm_year + 1900;
}

std::vector<tools::RawFinding> findings_of(const std::vector<tools::ToolRun>& runs, CycleReport& report)
{
    std::vector<tools::RawFinding> out;
    for (const auto& run : runs) {
        auto parsed = tools::parse_output(run);
        if (parsed.unparseable)
            report.warnings.push_back(std::string(to_string(run.tool)) + " on " + run.target_path +
                                      ": UnparseableOutput: " + parsed.error);
        out.insert(out.end(), parsed.findings.begin(), parsed.findings.end());
    }
    return out;
}

void warn(CycleReport& report, std::string message)
{
    util::log_warn(message);
    report.warnings.push_back(std::move(message));
}

} // namespace

Pipeline::Pipeline(PipelineConfig config) : config_(std::move(config))
{
    if (config_.taxonomy_path.empty()) {
        taxonomy_ = &Taxonomy::builtin();
    } else {
        owned_taxonomy_ = std::make_unique<Taxonomy>(Taxonomy::load_file(config_.taxonomy_path));
        taxonomy_ = owned_taxonomy_.get();
    }
}

std::vector<tools::ToolRun> Pipeline::tool_runs(store::Store& store, const lexing::SourceFile& file)
{
    const auto hash = tools::content_hash(file.content);
    std::vector<tools::ToolRun> cached;
    for (ToolId t : kAllTools) {
        auto run = store.find_tool_run(t, hash);
        // Failed runs are retried; a fixture or image may have appeared since.
        if (!run || run->exit_status == tools::ExitStatus::ToolError)
            break;
        run->target_path = file.path;
        cached.push_back(std::move(*run));
    }
    if (cached.size() == kAllTools.size())
        return cached;
    auto runs = tools::run_all_tools(file, config_.runner, config_.tool_settings);
    for (const auto& r : runs)
        store.upsert_tool_run(r);
    return runs;
}

void Pipeline::label_file(store::Store& store, std::int64_t file_change_id, const miner::FileChange& change,
                          CycleReport& report, std::vector<labeling::LabeledFinding>* labels_out)
{
    if ((change.change_type != miner::ChangeType::Modified && change.change_type != miner::ChangeType::Renamed) ||
        !change.code_before || !change.code_after)
        return;
    const auto before = lexing::SourceFile::from_path(change.old_path.value_or(change.path), *change.code_before);
    const auto after = lexing::SourceFile::from_path(change.path, *change.code_after);
    const labeling::FuseOptions fuse_options{config_.position_window};

    auto pre = labeling::fuse(findings_of(tool_runs(store, before), report), *taxonomy_, fuse_options);
    if (pre.empty()) {
        store.replace_labels(file_change_id, {});
        return;
    }
    for (auto& l : pre)
        l.path = change.path;
    auto verdict = labeling::filter_noise(change.commit_hash, change.path, pre,
                                          findings_of(tool_runs(store, after), report), *taxonomy_, fuse_options);
    store.set_verdict(file_change_id, verdict);
    if (verdict.verdict == labeling::Verdict::Noise) {
        ++report.noise_files;
        store.replace_labels(file_change_id, {});
        return;
    }

    const auto cve_severity = store.cve_severity_for_commit(change.commit_hash);
    for (auto& l : pre)
        l = labeling::attach_severity(std::move(l), cve_severity, *taxonomy_);
    store.replace_labels(file_change_id, pre);
    report.labels += pre.size();

    auto built = store::build_pairs(change.commit_hash, {store::LabeledFile{change, pre, verdict.verdict}});
    for (auto& w : built.warnings)
        warn(report, std::move(w));
    store.replace_pairs(file_change_id, built.pairs);
    report.pairs += built.pairs.size();
    if (labels_out)
        labels_out->insert(labels_out->end(), pre.begin(), pre.end());
}

void Pipeline::ingest_commit(store::Store& store, const miner::CommitBundle& bundle, CycleReport& report)
{
    if (store.has_commit(bundle.commit.hash)) {
        ++report.commits_skipped;
        return;
    }
    store::Store::Transaction tx(store);
    store.upsert_commit(bundle.commit);
    for (const auto& change : bundle.files) {
        std::vector<miner::Hunk> hunks;
        try {
            hunks = miner::parse_diff(change.diff);
        } catch (const Error& e) {
            warn(report, bundle.commit.hash + ":" + change.path + ": " + e.what());
        }
        std::optional<std::string> stripped_before, stripped_after;
        if (change.code_before)
            stripped_before = lexing::strip(lexing::SourceFile::from_path(change.old_path.value_or(change.path),
                                                                          *change.code_before))
                                  .content;
        if (change.code_after)
            stripped_after = lexing::strip(lexing::SourceFile::from_path(change.path, *change.code_after)).content;
        const auto id = store.upsert_file_change(change, stripped_before, stripped_after);
        store.replace_line_changes(id, hunks);
        label_file(store, id, change, report);
        ++report.files;
    }
    tx.commit();
    ++report.commits_ingested;
}

void Pipeline::ingest_nvd(store::Store& store, RunLedger& next, CycleReport& report)
{
    if (!feeds_) {
        if (config_.nvd.mode == "directory")
            feeds_ = std::make_unique<nvd::DirectoryFeedSource>(config_.nvd.feed_dir);
        else
            feeds_ = std::make_unique<nvd::HttpFeedSource>(config_.nvd.url_template);
    }
    std::vector<nvd::FeedDocument> docs;
    if (next.nvd_watermark) {
        docs.push_back(nvd::fetch_feed(*feeds_, "modified"));
    } else {
        const int last = config_.nvd.last_year.value_or(current_utc_year());
        docs = nvd::fetch_feeds(*feeds_, config_.nvd.first_year, last, true);
    }
    const auto terms = config_.nvd.filter_terms.empty() ? nvd::default_filter_terms() : config_.nvd.filter_terms;
    std::vector<nvd::CveRecord> records;
    for (const auto& doc : docs) {
        auto filtered = nvd::parse_and_filter(doc.json, terms);
        for (auto& w : filtered.warnings)
            warn(report, "feed " + doc.name + ": " + w);
        records.insert(records.end(), std::make_move_iterator(filtered.records.begin()),
                       std::make_move_iterator(filtered.records.end()));
    }
    records = nvd::dedupe(std::move(records));

    store::Store::Transaction tx(store);
    for (const auto& r : records) {
        store.upsert_cve(r);
        for (const auto& link : nvd::link_references(r))
            store.upsert_cve_commit_link(link);
    }
    tx.commit();
    for (const auto& r : records)
        next.advance_nvd(r.last_modified_date);
    report.cves += records.size();
    util::log_info("nvd: " + std::to_string(records.size()) + " relevant CVEs from " + std::to_string(docs.size()) +
                   " feeds");
}

void Pipeline::ingest_github(store::Store& store, const RunLedger& current, RunLedger& next, CycleReport& report)
{
    if (!github_) {
        if (config_.github.mode == "fixture")
            github_ = std::make_unique<miner::FixtureGitHubClient>(config_.github.manifest);
        else
            github_ = std::make_unique<miner::HttpGitHubClient>(config_.github.api_base, config_.github.token,
                                                                config_.github.per_page);
    }
    const miner::GitOptions git_options{"git", config_.cache_dir, config_.max_file_bytes};
    const std::int64_t backfill_epoch = miner::parse_iso8601(config_.backfill_start);

    for (Language lang : config_.github.languages) {
        const std::string lang_name(to_string(lang));
        std::string since = config_.backfill_start;
        if (auto it = current.github_cursors.find(lang_name); it != current.github_cursors.end() && it->second > since)
            since = it->second;
        auto discovered = miner::discover_repos(*github_, lang, since);
        {
            store::Store::Transaction tx(store);
            for (const auto& r : discovered.repos)
                store.upsert_repository(r);
            tx.commit();
        }
        if (discovered.cursor)
            next.advance_github(lang_name, *discovered.cursor);

        // Known repositories are revisited for new commits, one at a time.
        for (const auto& repo : store.repositories(lang)) {
            ++report.repos;
            std::int64_t since_epoch = backfill_epoch;
            if (auto it = current.repo_cursors.find(repo.repo_id); it != current.repo_cursors.end())
                since_epoch = std::max(since_epoch, it->second);
            miner::FetchResult fetched;
            try {
                fetched = miner::fetch_security_commits(repo, config_.keywords, since_epoch, git_options);
            } catch (const Error& e) {
                warn(report, repo.full_name + ": " + e.what());
                continue;
            }
            for (auto& w : fetched.warnings)
                warn(report, repo.full_name + ": " + w);
            for (const auto& bundle : fetched.commits) {
                ingest_commit(store, bundle, report);
                next.advance_repo(repo.repo_id, bundle.commit.committer_epoch);
            }
        }
    }
}

CycleReport Pipeline::run_cycle(store::Store& store, RunLedger& ledger, Source source)
{
    CycleReport report;
    RunLedger next = ledger;
    if (source == Source::Nvd || source == Source::All)
        ingest_nvd(store, next, report);
    if (source == Source::GitHub || source == Source::All)
        ingest_github(store, ledger, next, report);
    {
        store::Store::Transaction tx(store);
        store.resolve_cve_links();
        tx.commit();
    }
    next.last_run_at = miner::format_iso8601_utc(std::time(nullptr));
    ledger = std::move(next);
    return report;
}

std::vector<labeling::LabeledFinding> Pipeline::relabel_commit(store::Store& store, const std::string& hash)
{
    if (!store.has_commit(hash))
        throw Error(ErrorCode::IntegrityViolation, "commit " + hash + " is not in the store");
    CycleReport report;
    std::vector<labeling::LabeledFinding> labels;
    store::Store::Transaction tx(store);
    for (const auto& f : store.file_changes(hash))
        label_file(store, f.id, f.change, report, &labels);
    tx.commit();
    return labels;
}

std::vector<SteadyClock::time_point> run_schedule(SteadyClock::duration interval, const std::function<void()>& cycle,
                                                  const ScheduleHooks& hooks, std::optional<std::size_t> max_cycles)
{
    auto sleep = hooks.sleep ? hooks.sleep : [](SteadyClock::duration d) { std::this_thread::sleep_for(d); };
    std::vector<SteadyClock::time_point> starts;
    while (!hooks.stop_requested() && (!max_cycles || starts.size() < *max_cycles)) {
        if (!starts.empty()) {
            const auto due = starts.back() + interval;
            auto now = hooks.now();
            // Sleep in slices so a stop request is noticed promptly.
            while (now < due && !hooks.stop_requested()) {
                sleep(std::min<SteadyClock::duration>(due - now, std::chrono::seconds(1)));
                now = hooks.now();
            }
            if (hooks.stop_requested())
                break;
        }
        starts.push_back(hooks.now());
        try {
            cycle();
        } catch (const Error& e) {
            if (e.code() == ErrorCode::AlreadyRunning)
                throw;
            util::log_error(std::string("cycle failed: ") + e.what());
        } catch (const std::exception& e) {
            util::log_error(std::string("cycle failed: ") + e.what());
        }
    }
    return starts;
}

} // namespace automesc::pipeline
