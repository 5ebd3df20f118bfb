#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "automesc/util/process.hpp"

namespace testsupport {

std::filesystem::path fixture_dir();
std::filesystem::path fixture(const std::string& relative);
std::string cli_path();

class TempDir {
public:
    TempDir();
    ~TempDir();
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const std::filesystem::path& path() const { return path_; }
    std::string str(const std::string& child = {}) const { return child.empty() ? path_.string() : (path_ / child).string(); }

private:
    std::filesystem::path path_;
};

// Builds a git repository at `dest` from a repo script (see
// tests/fixtures/e2e/repo.json): files are copied from `files_dir`, commit
// dates and identities are fixed so hashes are reproducible. Returns the
// commit hashes oldest first.
std::vector<std::string> build_repo(const std::filesystem::path& script, const std::filesystem::path& files_dir,
                                    const std::filesystem::path& dest);

// Everything the end-to-end fixture needs in `root`: the repository, a GitHub
// manifest pointing at it, NVD feeds and a pipeline config. Returns the config
// path.
struct E2eFixture {
    std::string config_path;
    std::string store_path;
    std::vector<std::string> commits;
};
E2eFixture make_e2e(const std::filesystem::path& root);

// Runs the CLI with `args`, adding `--config` first when config is non-empty.
automesc::util::ProcessResult run_cli(const std::vector<std::string>& args, const std::string& config = {},
                                      const std::vector<std::string>& env = {});

// One NVD JSON 1.1 CVE item.
struct NvdEntry {
    std::string id;
    std::string description;
    std::vector<std::string> references;
    std::optional<double> v3_score;
    std::optional<double> v2_score;
    std::string last_modified = "2021-05-01T10:00Z";
    std::string cwe = "CWE-284";
};
std::string nvd_item_json(const NvdEntry& entry);
// Writes nvdcve-1.1-<name>.json.gz and a matching .meta into `dir`.
void write_feed(const std::filesystem::path& dir, const std::string& name, const std::vector<NvdEntry>& entries);

std::string git(const std::filesystem::path& repo, const std::vector<std::string>& args,
                const std::vector<std::string>& env = {});

} // namespace testsupport
