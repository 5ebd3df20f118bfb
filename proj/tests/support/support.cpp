#include "support.hpp"

#include <json.hpp>

#include <cctype>
#include <cstdlib>
#include <random>
#include <stdexcept>

#include "automesc/util/gzip.hpp"
#include "automesc/util/hash.hpp"
#include "automesc/util/strings.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace testsupport {

fs::path fixture_dir()
{
    return AUTOMESC_FIXTURE_DIR;
}

fs::path fixture(const std::string& relative)
{
    return fixture_dir() / relative;
}

std::string cli_path()
{
    return AUTOMESC_CLI_PATH;
}

TempDir::TempDir()
{
    std::random_device rd;
    for (int i = 0; i < 100; ++i) {
        auto p = fs::temp_directory_path() / ("automesc-test-" + std::to_string(rd()));
        if (fs::create_directory(p)) {
            path_ = p;
            return;
        }
    }
    throw std::runtime_error("cannot create a temporary directory");
}

TempDir::~TempDir()
{
    std::error_code ec;
    fs::remove_all(path_, ec);
}

std::string git(const fs::path& repo, const std::vector<std::string>& args, const std::vector<std::string>& env)
{
    std::vector<std::string> argv{"git", "-C", repo.string()};
    argv.insert(argv.end(), args.begin(), args.end());
    automesc::util::ProcessOptions opts;
    opts.env = env;
    opts.env.push_back("GIT_CONFIG_NOSYSTEM=1");
    opts.env.push_back("HOME=" + repo.string());
    auto r = automesc::util::run_process(argv, opts);
    if (r.exit_code != 0)
        throw std::runtime_error("git " + automesc::util::join(args, " ") + " failed: " + r.err);
    return r.out;
}

std::vector<std::string> build_repo(const fs::path& script, const fs::path& files_dir, const fs::path& dest)
{
    const auto j = json::parse(automesc::util::read_file(script.string()));
    fs::create_directories(dest);
    git(dest, {"init", "-q", "-b", "main"});
    const std::string name = j["author"]["name"], email = j["author"]["email"];
    std::vector<std::string> hashes;
    for (const auto& c : j["commits"]) {
        for (const auto& [path, source] : c["files"].items()) {
            const auto target = dest / path;
            if (source.is_null()) {
                git(dest, {"rm", "-q", path});
                continue;
            }
            fs::create_directories(target.parent_path());
            fs::copy_file(files_dir / source.get<std::string>(), target, fs::copy_options::overwrite_existing);
            git(dest, {"add", path});
        }
        const std::string date = c["date"];
        git(dest, {"-c", "user.name=" + name, "-c", "user.email=" + email, "-c", "commit.gpgsign=false", "commit", "-q",
                   "-m", c["message"].get<std::string>()},
            {"GIT_AUTHOR_DATE=" + date, "GIT_COMMITTER_DATE=" + date, "GIT_AUTHOR_NAME=" + name,
             "GIT_AUTHOR_EMAIL=" + email, "GIT_COMMITTER_NAME=" + name, "GIT_COMMITTER_EMAIL=" + email});
        hashes.push_back(std::string(automesc::util::trim(git(dest, {"rev-parse", "HEAD"}))));
    }
    return hashes;
}

namespace {

json nvd_item(const NvdEntry& e)
{
    json ref_data = json::array();
    for (const auto& r : e.references)
        ref_data.push_back({{"url", r}, {"name", r}, {"refsource", "MISC"}, {"tags", json::array()}});
    json impact = json::object();
    if (e.v3_score)
        impact["baseMetricV3"] = {{"cvssV3",
                                   {{"version", "3.1"},
                                    {"vectorString", "CVSS:3.1/AV:N/AC:L/PR:N/UI:N/S:U/C:N/I:H/A:N"},
                                    {"baseScore", *e.v3_score},
                                    {"privilegesRequired", "NONE"},
                                    {"userInteraction", "NONE"}}}};
    if (e.v2_score)
        impact["baseMetricV2"] = {{"cvssV2", {{"version", "2.0"}, {"vectorString", "AV:N/AC:L/Au:N/C:P/I:P/A:P"},
                                              {"baseScore", *e.v2_score}}},
                                  {"obtainAllPrivilege", false},
                                  {"obtainUserPrivilege", false},
                                  {"obtainOtherPrivilege", false},
                                  {"userInteractionRequired", false}};
    return {
        {"cve",
         {{"data_type", "CVE"},
          {"CVE_data_meta", {{"ID", e.id}, {"ASSIGNER", "cve@mitre.org"}}},
          {"problemtype",
           {{"problemtype_data", json::array({{{"description", json::array({{{"lang", "en"}, {"value", e.cwe}}})}}})}}},
          {"references", {{"reference_data", ref_data}}},
          {"description", {{"description_data", json::array({{{"lang", "en"}, {"value", e.description}}})}}}}},
        {"impact", impact},
        {"publishedDate", "2021-04-01T12:00Z"},
        {"lastModifiedDate", e.last_modified},
    };
}

} // namespace

std::string nvd_item_json(const NvdEntry& entry)
{
    return nvd_item(entry).dump();
}

void write_feed(const fs::path& dir, const std::string& name, const std::vector<NvdEntry>& entries)
{
    json items = json::array();
    for (const auto& e : entries)
        items.push_back(nvd_item(e));
    json doc{{"CVE_data_type", "CVE"},
             {"CVE_data_format", "MITRE"},
             {"CVE_data_version", "4.0"},
             {"CVE_data_numberOfCVEs", std::to_string(items.size())},
             {"CVE_data_timestamp", "2021-12-31T00:00Z"},
             {"CVE_Items", items}};
    const std::string text = doc.dump();
    fs::create_directories(dir);
    automesc::util::write_file((dir / ("nvdcve-1.1-" + name + ".json.gz")).string(), automesc::util::gzip(text));
    std::string digest = automesc::util::sha256_hex(text);
    for (auto& ch : digest)
        ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
    automesc::util::write_file((dir / ("nvdcve-1.1-" + name + ".meta")).string(),
                               "lastModifiedDate:2021-12-31T00:00:00-05:00\r\nsize:" + std::to_string(text.size()) +
                                   "\r\nsha256:" + digest + "\r\n");
}

E2eFixture make_e2e(const fs::path& root)
{
    E2eFixture fx;
    const auto e2e = fixture("e2e");
    fx.commits = build_repo(e2e / "repo.json", e2e / "files", root / "origin" / "vault");

    json manifest{{"page_size", 2},
                  {"repositories",
                   json::array({{{"id", 4242},
                                 {"name", "vault"},
                                 {"full_name", "acme/vault"},
                                 {"owner", {{"login", "acme"}}},
                                 {"description", "Ether vault"},
                                 {"homepage", ""},
                                 {"created_at", "2021-02-28T09:00:00Z"},
                                 {"pushed_at", "2021-03-05T08:00:00Z"},
                                 {"language", "Solidity"},
                                 {"forks_count", 3},
                                 {"clone_url", "origin/vault"}}})}};
    automesc::util::write_file((root / "github.json").string(), manifest.dump(2));

    // The tx.origin fix (fourth commit) is referenced by a High CVE; one
    // Ethereum CVE has no code link and one entry is unrelated.
    const auto feeds = root / "feeds";
    write_feed(feeds, "2021",
               {{"CVE-2021-3001", "Authorization through tx.origin in the acme vault Ethereum smart contract.",
                 {"https://github.com/acme/vault/commit/" + fx.commits[3]}, 8.1, std::nullopt, "2021-05-01T10:00Z"},
                {"CVE-2021-3002", "An Ethereum token wallet exposes the owner key through its web interface.",
                 {"https://example.org/advisory/3002"}, 5.3, std::nullopt, "2021-05-02T10:00Z"},
                {"CVE-2021-3003", "Buffer overflow in an image decoder.", {"https://example.org/advisory/3003"}, 9.8,
                 std::nullopt, "2021-05-03T10:00Z"}});
    write_feed(feeds, "modified",
               {{"CVE-2021-3002", "An Ethereum token wallet exposes the owner key through its web interface.",
                 {"https://example.org/advisory/3002"}, 5.3, std::nullopt, "2021-06-02T10:00Z"}});

    json config{{"store_path", "automesc.db"},
                {"ledger_path", "ledger.json"},
                {"cache_dir", "cache"},
                {"github", {{"mode", "fixture"}, {"manifest", "github.json"}, {"languages", {"Solidity"}}}},
                {"nvd", {{"mode", "directory"}, {"feed_dir", "feeds"}, {"first_year", 2021}, {"last_year", 2021}}},
                {"tools", {{"runner", "fixture"}, {"fixture_dir", (e2e / "tool_outputs").string()}}}};
    fx.config_path = (root / "config.json").string();
    fx.store_path = (root / "automesc.db").string();
    automesc::util::write_file(fx.config_path, config.dump(2));
    return fx;
}

automesc::util::ProcessResult run_cli(const std::vector<std::string>& args, const std::string& config,
                                      const std::vector<std::string>& env)
{
    std::vector<std::string> argv{cli_path()};
    if (!config.empty()) {
        argv.push_back("--config");
        argv.push_back(config);
    }
    argv.insert(argv.end(), args.begin(), args.end());
    automesc::util::ProcessOptions opts;
    opts.env = env;
    opts.env.push_back("AUTOMESC_LOG=warn");
    opts.timeout = std::chrono::milliseconds(120000);
    return automesc::util::run_process(argv, opts);
}

} // namespace testsupport
