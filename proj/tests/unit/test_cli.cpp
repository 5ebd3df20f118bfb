#include <gtest/gtest.h>

#include <json.hpp>

#include "automesc/pipeline/ledger.hpp"
#include "automesc/util/strings.hpp"
#include "support.hpp"

using namespace automesc;
using testsupport::run_cli;

namespace {

std::string empty_config(const testsupport::TempDir& dir)
{
    const auto path = dir.str("config.json");
    util::write_file(path, R"({"store_path": "empty.db", "ledger_path": "ledger.json"})");
    return path;
}

} // namespace

TEST(Cli, UsageErrorsExitWithOne)
{
    EXPECT_EQ(run_cli({"frobnicate"}).exit_code, 1);
    EXPECT_EQ(run_cli({"export", "--format", "csv"}).exit_code, 1);
    EXPECT_EQ(run_cli({"quality", "--in", "/nonexistent/x.csv"}).exit_code, 1);
    EXPECT_EQ(run_cli({"stats"}, "/nonexistent/config.json").exit_code, 1);
    EXPECT_EQ(run_cli({"--help"}).exit_code, 0);
}

TEST(Cli, StatsOnAnEmptyStore)
{
    testsupport::TempDir dir;
    auto r = run_cli({"stats", "--json"}, empty_config(dir));
    ASSERT_EQ(r.exit_code, 0) << r.err;
    auto j = nlohmann::json::parse(r.out);
    EXPECT_EQ(j["commits"], 0);
    EXPECT_EQ(j["pairs"], 0);
    EXPECT_EQ(j["severity"]["High"], 0);

    auto text = run_cli({"stats"}, empty_config(dir));
    EXPECT_EQ(text.exit_code, 0);
    EXPECT_NE(text.out.find("repositories"), std::string::npos);
}

TEST(Cli, ExportRejectsUnknownFormatAndWritesHeaders)
{
    testsupport::TempDir dir;
    const auto config = empty_config(dir);
    EXPECT_EQ(run_cli({"export", "--format", "xml", "--out", dir.str("x.xml")}, config).exit_code, 1);
    EXPECT_EQ(run_cli({"export", "--format", "csv", "--out", dir.str("x.csv"), "--table", "rows"}, config).exit_code, 1);
    EXPECT_EQ(run_cli({"export", "--format", "csv", "--out", dir.str("x.csv"), "--granularity", "block"}, config)
                  .exit_code,
              1);
    ASSERT_EQ(run_cli({"export", "--format", "csv", "--out", dir.str("pairs.csv")}, config).exit_code, 0);
    auto lines = util::split_lines(util::read_file(dir.str("pairs.csv")));
    EXPECT_FALSE(lines.empty());
    EXPECT_NE(lines[0].find("pair_id"), std::string::npos);
}

TEST(Cli, QualityReportsPlantedRates)
{
    auto r = run_cli({"quality", "--in", testsupport::fixture("quality/planted.csv").string()});
    ASSERT_EQ(r.exit_code, 0) << r.err;
    auto lines = util::split_lines(r.out);
    while (!lines.empty() && lines.back().empty())
        lines.pop_back();
    ASSERT_FALSE(lines.empty());
    auto j = nlohmann::json::parse(lines.back());
    EXPECT_DOUBLE_EQ(j["incompleteness"].get<double>(), 0.07);
    EXPECT_DOUBLE_EQ(j["redundancy"].get<double>(), 0.03);
    EXPECT_DOUBLE_EQ(j["inconsistency"].get<double>(), 0.02);

    auto bad = run_cli({"quality", "--in", testsupport::fixture("quality/planted.csv").string(), "--label-field",
                        "verdict"});
    EXPECT_EQ(bad.exit_code, 1);
}

TEST(Cli, SecondMinerIsRefusedWhileTheLockIsHeld)
{
    testsupport::TempDir dir;
    auto fx = testsupport::make_e2e(dir.path());
    const auto ledger = (dir.path() / "ledger.json").string();
    {
        pipeline::LedgerLock held(ledger);
        auto r = run_cli({"mine", "--daemon"}, fx.config_path);
        EXPECT_EQ(r.exit_code, 1) << r.err;
        EXPECT_NE(r.err.find("AlreadyRunning"), std::string::npos) << r.err;
    }
    EXPECT_EQ(run_cli({"mine", "--once", "--source", "sideways"}, fx.config_path).exit_code, 1);
}

TEST(Cli, LabelPrintsStoredVerdicts)
{
    testsupport::TempDir dir;
    auto fx = testsupport::make_e2e(dir.path());
    ASSERT_EQ(run_cli({"mine", "--once"}, fx.config_path).exit_code, 0);
    auto r = run_cli({"label", "--commit", fx.commits[1]}, fx.config_path);
    ASSERT_EQ(r.exit_code, 0) << r.err;
    auto j = nlohmann::json::parse(util::split_lines(r.out).at(0));
    EXPECT_EQ(j["canonical"], "reentrancy");
    EXPECT_EQ(j["line"], 13);
    EXPECT_EQ(j["severity"], "High");
    EXPECT_GE(j["votes"].get<int>(), j["threshold"].get<int>());

    EXPECT_EQ(run_cli({"label", "--commit", std::string(40, 'f')}, fx.config_path).exit_code, 1);
}
