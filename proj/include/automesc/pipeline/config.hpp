#pragma once

#include <chrono>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "automesc/core/types.hpp"
#include "automesc/tools/runner.hpp"

namespace automesc::pipeline {

enum class Source { GitHub, Nvd, All };

std::optional<Source> parse_source(std::string_view s);

struct GitHubSettings {
    std::string mode = "http"; // http | fixture
    std::string manifest;      // fixture mode
    std::string api_base = "https://api.github.com";
    std::string token;
    int per_page = 100;
    std::vector<Language> languages{Language::Solidity, Language::Vyper};
};

struct NvdSettings {
    std::string mode = "http"; // http | directory
    std::string feed_dir;
    std::string url_template = "https://nvd.nist.gov/feeds/json/cve/1.1/nvdcve-1.1-{name}.json.gz";
    int first_year = 2016;
    std::optional<int> last_year; // current UTC year when unset
    std::vector<std::string> filter_terms;
};

struct PipelineConfig {
    std::string store_path = "automesc.db";
    std::string ledger_path = "automesc-ledger.json";
    std::string cache_dir = ".automesc-cache";
    std::string taxonomy_path; // empty: the built-in taxonomy
    std::string backfill_start = "2016-01-01T00:00:00Z";
    std::chrono::seconds poll_interval{2 * 60 * 60};
    std::size_t max_file_bytes = 1 << 20;
    std::size_t position_window = 0;
    KeywordRuleSet keywords = KeywordRuleSet::defaults();
    GitHubSettings github;
    NvdSettings nvd;
    tools::RunnerKind runner = tools::RunnerKind::Container;
    tools::ToolSettings tool_settings;
};

// Defaults, then the JSON file (when given), then environment overrides:
//   AUTOMESC_GITHUB_TOKEN, AUTOMESC_STORE_PATH, AUTOMESC_LEDGER_PATH,
//   AUTOMESC_CACHE_DIR, AUTOMESC_TOOL_FIXTURES.
// Relative paths in the file resolve against the file's directory. Throws
// Error(ConfigError) on unknown keys, bad values, tools outside the closed
// set, poll intervals under a minute or backfill before 2016.
PipelineConfig load_config(const std::optional<std::string>& path);
PipelineConfig parse_config(const std::string& json_text, const std::string& base_dir);

// Applies the environment overrides and validates.
void finalize_config(PipelineConfig& config);

} // namespace automesc::pipeline
