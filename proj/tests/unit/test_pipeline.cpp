#include <gtest/gtest.h>

#include <json.hpp>

#include <cstdlib>

#include "automesc/pipeline/config.hpp"
#include "automesc/pipeline/ledger.hpp"
#include "automesc/pipeline/pipeline.hpp"
#include "automesc/util/error.hpp"
#include "automesc/util/strings.hpp"
#include "support.hpp"

using namespace automesc;
using namespace std::chrono_literals;

namespace {

ErrorCode config_error(const std::string& json)
{
    try {
        auto c = pipeline::parse_config(json, "/base");
        pipeline::finalize_config(c);
    } catch (const Error& e) {
        return e.code();
    }
    return ErrorCode::IoError;
}

} // namespace

TEST(Config, DefaultsAndRelativePaths)
{
    auto c = pipeline::parse_config(R"({"store_path": "data/x.db", "cache_dir": "/abs/cache",
        "github": {"mode": "fixture", "manifest": "m.json", "languages": ["Vyper"]},
        "nvd": {"mode": "directory", "feed_dir": "feeds"},
        "tools": {"runner": "fixture", "fixture_dir": "out", "vyper_support": ["Slither"], "concurrency": 2}})",
                                    "/base");
    EXPECT_EQ(c.store_path, "/base/data/x.db");
    EXPECT_EQ(c.cache_dir, "/abs/cache");
    EXPECT_EQ(c.github.manifest, "/base/m.json");
    EXPECT_EQ(c.github.languages, std::vector<Language>{Language::Vyper});
    EXPECT_EQ(c.nvd.feed_dir, "/base/feeds");
    EXPECT_EQ(c.runner, tools::RunnerKind::Fixture);
    EXPECT_EQ(c.tool_settings.fixture_dir, "/base/out");
    EXPECT_EQ(c.tool_settings.vyper_support, std::set<ToolId>{ToolId::Slither});
    EXPECT_EQ(c.poll_interval, 2h);
    EXPECT_EQ(c.backfill_start, "2016-01-01T00:00:00Z");
    EXPECT_EQ(c.nvd.first_year, 2016);

    auto d = pipeline::parse_config("{}", "/base");
    EXPECT_EQ(d.runner, tools::RunnerKind::Container);
    EXPECT_EQ(d.keywords.keywords, KeywordRuleSet::defaults().keywords);
}

TEST(Config, RejectsBadValues)
{
    EXPECT_EQ(config_error(R"({"store": "x"})"), ErrorCode::ConfigError);
    EXPECT_EQ(config_error(R"({"poll_interval_seconds": 30})"), ErrorCode::ConfigError);
    EXPECT_EQ(config_error(R"({"backfill_start": "2015-12-31T23:59:59Z"})"), ErrorCode::ConfigError);
    EXPECT_EQ(config_error(R"({"nvd": {"first_year": 2015}})"), ErrorCode::ConfigError);
    EXPECT_EQ(config_error(R"({"github": {"mode": "fixture"}})"), ErrorCode::ConfigError);
    EXPECT_EQ(config_error(R"({"tools": {"vyper_support": ["Securify"]}})"), ErrorCode::ConfigError);
    EXPECT_EQ(config_error(R"({"tools": {"runner": "magic"}})"), ErrorCode::ConfigError);
    EXPECT_EQ(config_error("[1, 2"), ErrorCode::ConfigError);
}

TEST(Config, EnvironmentOverridesTheFile)
{
    testsupport::TempDir dir;
    util::write_file(dir.str("c.json"), R"({"store_path": "a.db"})");
    ::setenv("AUTOMESC_STORE_PATH", "/elsewhere/b.db", 1);
    ::setenv("AUTOMESC_GITHUB_TOKEN", "t0k", 1);
    auto c = pipeline::load_config(dir.str("c.json"));
    ::unsetenv("AUTOMESC_STORE_PATH");
    ::unsetenv("AUTOMESC_GITHUB_TOKEN");
    EXPECT_EQ(c.store_path, "/elsewhere/b.db");
    EXPECT_EQ(c.github.token, "t0k");
}

TEST(Ledger, CursorsOnlyMoveForwardAndSurviveReload)
{
    testsupport::TempDir dir;
    pipeline::RunLedger l;
    l.advance_github("Solidity", "2021-03-01T00:00:00Z");
    l.advance_github("Solidity", "2020-01-01T00:00:00Z");
    l.advance_repo(7, 100);
    l.advance_repo(7, 50);
    l.advance_nvd("2021-06-02T10:00Z");
    l.advance_nvd("2021-01-01T00:00Z");
    l.last_run_at = "2021-06-03T00:00:00Z";
    l.save(dir.str("ledger.json"));

    auto back = pipeline::RunLedger::load(dir.str("ledger.json"));
    EXPECT_EQ(back.github_cursors.at("Solidity"), "2021-03-01T00:00:00Z");
    EXPECT_EQ(back.repo_cursors.at(7), 100);
    EXPECT_EQ(back.nvd_watermark, "2021-06-02T10:00Z");
    EXPECT_EQ(back.last_run_at, "2021-06-03T00:00:00Z");
    EXPECT_FALSE(back.in_progress);
    EXPECT_FALSE(std::filesystem::exists(dir.str("ledger.json.tmp")));

    EXPECT_TRUE(pipeline::RunLedger::load(dir.str("absent.json")).github_cursors.empty());
    util::write_file(dir.str("bad.json"), "not json");
    EXPECT_THROW(pipeline::RunLedger::load(dir.str("bad.json")), Error);
}

TEST(Ledger, LockIsExclusive)
{
    testsupport::TempDir dir;
    auto first = std::make_unique<pipeline::LedgerLock>(dir.str("ledger.json"));
    try {
        pipeline::LedgerLock second(dir.str("ledger.json"));
        FAIL() << "second lock acquired";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::AlreadyRunning);
    }
    first.reset();
    EXPECT_NO_THROW(pipeline::LedgerLock again(dir.str("ledger.json")));
}

namespace {

struct FakeClock {
    pipeline::SteadyClock::time_point t{};
    std::size_t sleeps = 0;
    pipeline::SteadyClock::duration longest_sleep{};

    pipeline::ScheduleHooks hooks()
    {
        pipeline::ScheduleHooks h;
        h.now = [this] { return t; };
        h.sleep = [this](pipeline::SteadyClock::duration d) {
            ++sleeps;
            longest_sleep = std::max(longest_sleep, d);
            t += d;
        };
        return h;
    }
};

} // namespace

TEST(Schedule, CyclesStartOneIntervalApartWithoutCatchUp)
{
    FakeClock clock;
    const auto origin = clock.t;
    std::vector<std::chrono::minutes> durations{10min, 180min, 10min, 10min};
    std::size_t i = 0;
    auto starts = pipeline::run_schedule(
        2h, [&] { clock.t += durations[i++]; }, clock.hooks(), 4);
    ASSERT_EQ(starts.size(), 4u);
    EXPECT_EQ(starts[0] - origin, 0h);
    EXPECT_EQ(starts[1] - origin, 2h);
    EXPECT_EQ(starts[2] - origin, 5h); // the overrun cycle ended at 5h
    EXPECT_EQ(starts[3] - origin, 7h);
    EXPECT_LE(clock.longest_sleep, 1s);
}

TEST(Schedule, FailingCycleIsLoggedAndStopIsHonoured)
{
    FakeClock clock;
    int runs = 0;
    auto hooks = clock.hooks();
    hooks.stop_requested = [&] { return runs >= 3; };
    auto starts = pipeline::run_schedule(
        1h,
        [&] {
            ++runs;
            throw Error(ErrorCode::NetworkError, "offline");
        },
        hooks);
    EXPECT_EQ(runs, 3);
    EXPECT_EQ(starts.size(), 3u);

    FakeClock again;
    EXPECT_THROW(pipeline::run_schedule(
                     1h, [] { throw Error(ErrorCode::AlreadyRunning, "held"); }, again.hooks(), 5),
                 Error);
}

TEST(PipelineCycle, SecondCycleSkipsStoredCommitsAndReadsOnlyTheModifiedFeed)
{
    testsupport::TempDir dir;
    auto fx = testsupport::make_e2e(dir.path());
    auto config = pipeline::load_config(fx.config_path);
    pipeline::Pipeline p(config);
    store::Store db(config.store_path);
    pipeline::RunLedger ledger;

    auto first = p.run_cycle(db, ledger, pipeline::Source::All);
    EXPECT_EQ(first.repos, 1u);
    EXPECT_EQ(first.commits_ingested, 2u);
    EXPECT_EQ(first.files, 4u);
    EXPECT_EQ(first.noise_files, 1u);
    EXPECT_EQ(first.labels, 2u);
    EXPECT_EQ(first.pairs, 6u);
    EXPECT_EQ(first.cves, 2u);
    EXPECT_EQ(ledger.nvd_watermark, "2021-06-02T10:00Z");
    EXPECT_EQ(ledger.github_cursors.at("Solidity"), "2021-02-28T09:00:00Z");
    EXPECT_TRUE(ledger.last_run_at);

    // Removing the yearly feed proves the incremental cycle does not read it.
    std::filesystem::remove(dir.path() / "feeds" / "nvdcve-1.1-2021.json.gz");
    auto counts = db.row_counts();
    auto second = p.run_cycle(db, ledger, pipeline::Source::All);
    EXPECT_EQ(second.commits_ingested, 0u);
    EXPECT_EQ(db.row_counts(), counts);

    auto labels = p.relabel_commit(db, fx.commits[3]);
    ASSERT_EQ(labels.size(), 1u);
    EXPECT_EQ(labels[0].canonical, "authorization-through-tx-origin");
    EXPECT_EQ(labels[0].severity, SeverityLevel::High);
    EXPECT_EQ(db.row_counts(), counts);
    EXPECT_THROW(p.relabel_commit(db, std::string(40, 'a')), Error);
}

TEST(PipelineCycle, NvdOnlyLeavesGitHubUntouched)
{
    testsupport::TempDir dir;
    auto fx = testsupport::make_e2e(dir.path());
    auto config = pipeline::load_config(fx.config_path);
    pipeline::Pipeline p(config);
    store::Store db(config.store_path);
    pipeline::RunLedger ledger;
    auto r = p.run_cycle(db, ledger, pipeline::Source::Nvd);
    EXPECT_EQ(r.cves, 2u);
    EXPECT_EQ(db.row_counts()["commits"], 0);
    EXPECT_TRUE(ledger.github_cursors.empty());
    EXPECT_EQ(db.cve_severity_for_commit(fx.commits[3]), SeverityLevel::High);
}
