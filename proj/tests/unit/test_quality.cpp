#include <gtest/gtest.h>

#include <json.hpp>

#include "automesc/quality/quality.hpp"
#include "automesc/util/error.hpp"
#include "automesc/util/strings.hpp"
#include "support.hpp"

using namespace automesc;

namespace {

store::Dataset planted(store::ExportFormat fmt)
{
    const char* name = fmt == store::ExportFormat::Csv ? "quality/planted.csv" : "quality/planted.jsonl";
    return store::parse_dataset(util::read_file(testsupport::fixture(name).string()), fmt);
}

util::CsvRow row(std::initializer_list<const char*> cells)
{
    util::CsvRow r;
    for (const char* c : cells)
        r.push_back(c ? std::optional<std::string>(c) : std::nullopt);
    return r;
}

} // namespace

TEST(Quality, PlantedDefectsAreRecovered)
{
    const auto truth = nlohmann::json::parse(util::read_file(testsupport::fixture("quality/planted.json").string()));
    for (auto fmt : {store::ExportFormat::Csv, store::ExportFormat::Jsonl}) {
        SCOPED_TRACE(std::string(store::to_string(fmt)));
        auto report = quality::assess(planted(fmt));
        EXPECT_EQ(report.n, 100u);
        EXPECT_DOUBLE_EQ(report.incompleteness, 0.07);
        EXPECT_DOUBLE_EQ(report.redundancy, 0.03);
        EXPECT_DOUBLE_EQ(report.inconsistency, 0.02);
        EXPECT_EQ(report.missing, truth["missing"].get<std::vector<std::size_t>>());
        EXPECT_EQ(report.duplicates, truth["duplicates"].get<std::vector<std::size_t>>());
        EXPECT_EQ(report.conflicting, truth["conflicting"].get<std::vector<std::size_t>>());
    }
}

TEST(Quality, EmptyDatasetScoresZero)
{
    store::Dataset d;
    d.columns = {"commit_hash", "path", "line", "labels"};
    auto r = quality::assess(d);
    EXPECT_EQ(r.n, 0u);
    EXPECT_EQ(r.incompleteness, 0.0);
    EXPECT_EQ(r.redundancy, 0.0);
    EXPECT_EQ(r.inconsistency, 0.0);
    EXPECT_EQ(quality::assess(store::Dataset{}).n, 0u);
}

TEST(Quality, NullKeysNeverConflictAndFieldsAreChecked)
{
    store::Dataset d;
    d.columns = {"commit_hash", "path", "line", "labels"};
    d.rows = {row({"a", "p", nullptr, "x"}), row({"a", "p", nullptr, "y"}), row({"a", "p", "1", "x"}),
              row({"a", "p", "1", "x"})};
    auto r = quality::assess(d);
    EXPECT_TRUE(r.conflicting.empty());
    EXPECT_EQ(r.duplicates, std::vector<std::size_t>{3});

    quality::AssessOptions opts;
    opts.key_fields = {"commit_hash", "path"};
    auto by_file = quality::assess(d, opts);
    EXPECT_EQ(by_file.conflicting, (std::vector<std::size_t>{0, 1, 2, 3}));

    opts.label_field = "verdict";
    try {
        quality::assess(d, opts);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::UnknownField);
    }
}

TEST(Quality, ReportEndsWithOneJsonLine)
{
    auto text = quality::format_report(quality::assess(planted(store::ExportFormat::Csv)));
    auto lines = util::split_lines(text);
    while (!lines.empty() && lines.back().empty())
        lines.pop_back();
    ASSERT_FALSE(lines.empty());
    auto j = nlohmann::json::parse(lines.back());
    EXPECT_EQ(j["n"], 100);
    EXPECT_DOUBLE_EQ(j["incompleteness"].get<double>(), 0.07);
    EXPECT_NE(text.find("incompleteness  0.070000"), std::string::npos) << text;
}
