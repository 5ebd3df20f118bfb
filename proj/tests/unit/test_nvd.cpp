#include <gtest/gtest.h>

#include <httplib.h>
#include <json.hpp>

#include <set>
#include <thread>

#include "automesc/nvd/cve.hpp"
#include "automesc/nvd/feeds.hpp"
#include "automesc/util/error.hpp"
#include "automesc/util/gzip.hpp"
#include "automesc/util/strings.hpp"
#include "support.hpp"

using namespace automesc;
using testsupport::NvdEntry;

namespace {

NvdEntry entry(std::string id, std::string description, double v3_score = 5.0)
{
    NvdEntry e;
    e.id = std::move(id);
    e.description = std::move(description);
    e.v3_score = v3_score;
    return e;
}

// Ten entries; 0002, 0005 and 0009 mention Ethereum (0009 only in a reference URL).
std::vector<NvdEntry> ten_entries()
{
    std::vector<NvdEntry> out;
    for (int i = 0; i < 10; ++i) {
        NvdEntry e;
        e.id = "CVE-2018-000" + std::to_string(i);
        e.description = "Heap overflow in image library " + std::to_string(i) + ".";
        e.references = {"https://example.org/advisory/" + std::to_string(i)};
        e.v3_score = 5.0;
        out.push_back(e);
    }
    out[2].description = "Integer overflow in the batchTransfer function of an Ethereum token.";
    out[2].references.push_back("https://github.com/acme/token/commit/0123456789abcdef0123456789abcdef01234567");
    out[2].v3_score = 9.8;
    out[5].description = "The ETHEREUM wallet contract allows anyone to call kill().";
    out[5].v3_score.reset();
    out[5].v2_score = 5.0;
    out[5].cwe = "NVD-CWE-Other";
    out[9].references = {"https://github.com/ethereum/solidity/issues/1"};
    out[9].v3_score.reset();
    return out;
}

nvd::FilterResult parse(const std::vector<NvdEntry>& entries)
{
    testsupport::TempDir dir;
    testsupport::write_feed(dir.path(), "x", entries);
    nvd::DirectoryFeedSource src(dir.str());
    return nvd::parse_and_filter(nvd::fetch_feed(src, "x").json, nvd::default_filter_terms());
}

} // namespace

TEST(NvdFilter, KeepsOnlyEthereumRelatedEntries)
{
    auto result = parse(ten_entries());
    EXPECT_EQ(result.total_entries, 10u);
    ASSERT_EQ(result.records.size(), 3u);
    EXPECT_TRUE(result.warnings.empty());
    EXPECT_EQ(result.matching_entries, 3u);

    std::map<std::string, nvd::CveRecord> by_id;
    for (const auto& r : result.records)
        by_id[r.cve_id] = r;
    ASSERT_EQ(by_id.size(), 3u);
    const auto& a = by_id.at("CVE-2018-0002");
    EXPECT_EQ(a.severity, SeverityLevel::High);
    ASSERT_TRUE(a.cvss_v3);
    EXPECT_DOUBLE_EQ(a.cvss_v3->base_score, 9.8);
    EXPECT_EQ(a.cwe_ids, std::vector<std::string>{"CWE-284"});
    EXPECT_EQ(a.user_privilege, "NONE");
    EXPECT_EQ(a.reference_urls.size(), 2u);
    EXPECT_EQ(a.published_date, "2021-04-01T12:00Z");

    const auto& b = by_id.at("CVE-2018-0005");
    EXPECT_FALSE(b.cvss_v3);
    ASSERT_TRUE(b.cvss_v2);
    EXPECT_EQ(b.severity, SeverityLevel::Medium);

    const auto& c = by_id.at("CVE-2018-0009");
    EXPECT_FALSE(c.cvss_v2);
    EXPECT_EQ(c.severity, SeverityLevel::Low);
}

TEST(NvdFilter, MalformedMatchingEntryBecomesAWarning)
{
    nlohmann::json items = nlohmann::json::array();
    items.push_back(nlohmann::json::parse(testsupport::nvd_item_json(entry("CVE-2020-1111", "Ethereum thing", 7.5))));
    items.push_back({{"cve", {{"description", {{"description_data", {{{"value", "Ethereum, but no id"}}}}}}}}});
    items.push_back(nlohmann::json::parse(testsupport::nvd_item_json(entry("CVE-2020-2222", "unrelated", 7.5))));
    nlohmann::json feed{{"CVE_Items", items}};
    auto r = nvd::parse_and_filter(feed.dump(), nvd::default_filter_terms());
    EXPECT_EQ(r.total_entries, 3u);
    EXPECT_EQ(r.records.size(), 1u);
    EXPECT_EQ(r.warnings.size(), 1u);
    EXPECT_EQ(r.matching_entries, r.records.size() + r.warnings.size());
    EXPECT_THROW(nvd::parse_and_filter("{\"nope\": 1}", nvd::default_filter_terms()), Error);
}

TEST(NvdSeverity, BandBoundaries)
{
    EXPECT_EQ(nvd::severity_from_score(0.0), SeverityLevel::Low);
    EXPECT_EQ(nvd::severity_from_score(3.9), SeverityLevel::Low);
    EXPECT_EQ(nvd::severity_from_score(4.0), SeverityLevel::Medium);
    EXPECT_EQ(nvd::severity_from_score(6.9), SeverityLevel::Medium);
    EXPECT_EQ(nvd::severity_from_score(7.0), SeverityLevel::High);
    EXPECT_EQ(nvd::severity_from_score(10.0), SeverityLevel::High);
    // Monotone over the whole range in tenths.
    for (int t = 1; t <= 100; ++t)
        EXPECT_GE(nvd::severity_from_score(t / 10.0), nvd::severity_from_score((t - 1) / 10.0));

    nvd::Cvss v3{"", 3.9}, v2{"", 9.0};
    EXPECT_EQ(nvd::derive_severity(v3, v2), SeverityLevel::Low);
    EXPECT_EQ(nvd::derive_severity(std::nullopt, v2), SeverityLevel::High);
    EXPECT_EQ(nvd::derive_severity(std::nullopt, std::nullopt), SeverityLevel::Low);
}

TEST(NvdDedupe, YearlyAndModifiedOverlap)
{
    auto year = ten_entries();
    std::vector<NvdEntry> modified;
    for (int i : {2, 5, 6}) {
        auto e = year[i];
        e.last_modified = "2022-01-0" + std::to_string(i) + "T00:00Z";
        e.description += " Ethereum";
        modified.push_back(e);
    }
    auto records = parse(year).records;
    auto more = parse(modified).records;
    records.insert(records.end(), more.begin(), more.end());

    std::set<std::string> distinct;
    for (const auto& r : records)
        distinct.insert(r.cve_id);
    auto deduped = nvd::dedupe(records);
    EXPECT_EQ(deduped.size(), distinct.size());
    EXPECT_EQ(deduped.size(), 4u);
    for (const auto& r : deduped) {
        if (r.cve_id != "CVE-2018-0009") {
            EXPECT_EQ(r.last_modified_date.substr(0, 4), "2022") << r.cve_id;
        }
    }

    auto unique = parse(year).records;
    auto same = nvd::dedupe(unique);
    ASSERT_EQ(same.size(), unique.size());
}

TEST(NvdDedupe, LaterModificationWins)
{
    nvd::CveRecord a, b;
    a.cve_id = b.cve_id = "CVE-2021-41121";
    a.last_modified_date = "2021-10-06T18:15Z";
    a.description = "old";
    b.last_modified_date = "2021-10-14T13:37Z";
    b.description = "new";
    auto out = nvd::dedupe({b, a});
    ASSERT_EQ(out.size(), 1u);
    EXPECT_EQ(out[0].description, "new");
}

TEST(NvdLinks, RecognizesRepositoryAndCommitUrls)
{
    nvd::CveRecord r;
    r.cve_id = "CVE-2021-1";
    r.reference_urls = {"https://github.com/Owner/Repo/commit/0123456789abcdef0123456789abcdef01234567",
                        "https://gitlab.com/grp/proj", "https://nvd.nist.gov/vuln/detail/CVE-2021-1",
                        "https://github.com/owner/other/issues/3"};
    auto links = nvd::link_references(r);
    ASSERT_GE(links.size(), 2u);
    EXPECT_EQ(links[0].repo_url, "https://github.com/Owner/Repo");
    EXPECT_EQ(links[0].commit_hash, "0123456789abcdef0123456789abcdef01234567");
    EXPECT_EQ(links[1].repo_url, "https://gitlab.com/grp/proj");
    EXPECT_FALSE(links[1].commit_hash);
    for (const auto& l : links)
        EXPECT_EQ(l.repo_url.find("nvd.nist.gov"), std::string::npos);
}

TEST(NvdCwe, PlaceholdersAreCategories)
{
    nvd::CveRecord r;
    r.cwe_ids = {"CWE-190", "NVD-CWE-Other", "NVD-CWE-noinfo"};
    auto cwes = nvd::cwe_types_for(r);
    ASSERT_EQ(cwes.size(), 3u);
    EXPECT_FALSE(cwes[0].is_category);
    EXPECT_TRUE(cwes[1].is_category);
    EXPECT_TRUE(cwes[2].is_category);
}

TEST(NvdFeeds, ServedYearsPlusModified)
{
    testsupport::TempDir dir;
    for (const char* name : {"2016", "2017", "2018", "modified"})
        testsupport::write_feed(dir.path(), name, {entry(std::string("CVE-") + (name[0] == 'm' ? "2018" : name) + "-0001", "Ethereum")});
    httplib::Server server;
    server.set_mount_point("/feeds", dir.str());
    const int port = server.bind_to_any_port("127.0.0.1");
    std::thread t([&] { server.listen_after_bind(); });
    server.wait_until_ready();

    nvd::HttpFeedSource src("http://127.0.0.1:" + std::to_string(port) + "/feeds/nvdcve-1.1-{name}.json.gz");
    auto docs = nvd::fetch_feeds(src, 2016, 2018);
    server.stop();
    t.join();
    ASSERT_EQ(docs.size(), 4u);
    EXPECT_EQ(docs[0].name, "2016");
    EXPECT_EQ(docs[3].name, "modified");
    for (const auto& d : docs)
        EXPECT_EQ(nvd::parse_and_filter(d.json, nvd::default_filter_terms()).records.size(), 1u);
}

TEST(NvdFeeds, CorruptPayloadIsChecksumMismatch)
{
    testsupport::TempDir dir;
    testsupport::write_feed(dir.path(), "2019", {entry("CVE-2019-1", "Ethereum")});
    const auto gz = dir.str("nvdcve-1.1-2019.json.gz");
    std::string bytes = util::read_file(gz);
    bytes[bytes.size() / 2] ^= 0x5a;
    util::write_file(gz, bytes);
    nvd::DirectoryFeedSource src(dir.str());
    try {
        nvd::fetch_feed(src, "2019");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::ChecksumMismatch);
    }

    // Valid gzip, wrong published digest.
    testsupport::write_feed(dir.path(), "2020", {entry("CVE-2020-1", "Ethereum")});
    util::write_file(dir.str("nvdcve-1.1-2020.meta"), "sha256:" + std::string(64, 'A') + "\r\n");
    try {
        nvd::fetch_feed(src, "2020");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::ChecksumMismatch);
    }
    EXPECT_THROW(nvd::fetch_feeds(src, 2015, 2016), Error);
}
