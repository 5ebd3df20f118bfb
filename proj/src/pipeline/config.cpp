#include "automesc/pipeline/config.hpp"

#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <set>

#include "automesc/miner/git.hpp"
#include "automesc/util/error.hpp"
#include "automesc/util/strings.hpp"

namespace automesc::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

std::optional<Source> parse_source(std::string_view s)
{
    if (s == "github")
        return Source::GitHub;
    if (s == "nvd")
        return Source::Nvd;
    if (s == "all")
        return Source::All;
    return std::nullopt;
}

namespace {

[[noreturn]] void fail(const std::string& what)
{
    throw Error(ErrorCode::ConfigError, what);
}

void check_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed)
{
    if (!obj.is_object())
        fail(where + " must be an object");
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [k, v] : obj.items())
        if (!ok.count(k))
            fail("unknown key '" + (where.empty() ? k : where + "." + k) + "'");
}

template <typename T>
T get(const json& obj, const char* key, const std::string& where)
{
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception&) {
        fail("'" + where + key + "' has the wrong type");
    }
}

std::string resolve_path(const std::string& p, const std::string& base)
{
    if (p.empty() || fs::path(p).is_absolute() || base.empty())
        return p;
    return (fs::path(base) / p).lexically_normal().string();
}

std::vector<std::string> string_list(const json& obj, const char* key, const std::string& where)
{
    auto v = get<std::vector<std::string>>(obj, key, where);
    if (v.empty())
        fail("'" + where + key + "' must not be empty");
    return v;
}

ToolId tool_named(const std::string& name)
{
    auto t = parse_tool(name);
    if (!t)
        throw Error(ErrorCode::ConfigError, "UnknownTool: '" + name + "' is not one of the seven supported tools");
    return *t;
}

void parse_tools(const json& t, PipelineConfig& c, const std::string& base)
{
    check_keys(t, "tools", {"runner", "fixture_dir", "timeout_seconds", "concurrency", "vyper_support", "containers",
                            "container_executable"});
    if (t.contains("runner")) {
        auto r = tools::parse_runner_kind(get<std::string>(t, "runner", "tools."));
        if (!r)
            fail("tools.runner must be 'container' or 'fixture'");
        c.runner = *r;
    }
    if (t.contains("fixture_dir"))
        c.tool_settings.fixture_dir = resolve_path(get<std::string>(t, "fixture_dir", "tools."), base);
    if (t.contains("timeout_seconds")) {
        auto s = get<std::int64_t>(t, "timeout_seconds", "tools.");
        if (s < 1)
            fail("tools.timeout_seconds must be positive");
        c.tool_settings.timeout = std::chrono::seconds(s);
    }
    if (t.contains("concurrency")) {
        auto n = get<std::int64_t>(t, "concurrency", "tools.");
        if (n < 1)
            fail("tools.concurrency must be positive");
        c.tool_settings.concurrency = static_cast<std::size_t>(n);
    }
    if (t.contains("container_executable"))
        c.tool_settings.container_executable = get<std::string>(t, "container_executable", "tools.");
    if (t.contains("vyper_support")) {
        c.tool_settings.vyper_support.clear();
        for (const auto& name : get<std::vector<std::string>>(t, "vyper_support", "tools."))
            c.tool_settings.vyper_support.insert(tool_named(name));
    }
    if (t.contains("containers")) {
        const auto& containers = t["containers"];
        if (!containers.is_object())
            fail("tools.containers must be an object");
        for (const auto& [name, spec] : containers.items()) {
            check_keys(spec, "tools.containers." + name, {"image", "command"});
            tools::ContainerSpec cs;
            cs.image = get<std::string>(spec, "image", "tools.containers." + name + ".");
            if (spec.contains("command"))
                cs.command = get<std::vector<std::string>>(spec, "command", "tools.containers." + name + ".");
            c.tool_settings.containers[tool_named(name)] = std::move(cs);
        }
    }
}

} // namespace

PipelineConfig parse_config(const std::string& json_text, const std::string& base_dir)
{
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        fail(std::string("config is not valid JSON: ") + e.what());
    }
    check_keys(j, "", {"store_path", "ledger_path", "cache_dir", "taxonomy_path", "backfill_start",
                       "poll_interval_seconds", "max_file_bytes", "position_window", "keywords", "context_terms",
                       "github", "nvd", "tools"});
    PipelineConfig c;
    if (j.contains("store_path"))
        c.store_path = resolve_path(get<std::string>(j, "store_path", ""), base_dir);
    if (j.contains("ledger_path"))
        c.ledger_path = resolve_path(get<std::string>(j, "ledger_path", ""), base_dir);
    if (j.contains("cache_dir"))
        c.cache_dir = resolve_path(get<std::string>(j, "cache_dir", ""), base_dir);
    if (j.contains("taxonomy_path"))
        c.taxonomy_path = resolve_path(get<std::string>(j, "taxonomy_path", ""), base_dir);
    if (j.contains("backfill_start"))
        c.backfill_start = get<std::string>(j, "backfill_start", "");
    if (j.contains("poll_interval_seconds"))
        c.poll_interval = std::chrono::seconds(get<std::int64_t>(j, "poll_interval_seconds", ""));
    if (j.contains("max_file_bytes")) {
        auto n = get<std::int64_t>(j, "max_file_bytes", "");
        if (n < 1)
            fail("max_file_bytes must be positive");
        c.max_file_bytes = static_cast<std::size_t>(n);
    }
    if (j.contains("position_window")) {
        auto n = get<std::int64_t>(j, "position_window", "");
        if (n < 0)
            fail("position_window must not be negative");
        c.position_window = static_cast<std::size_t>(n);
    }
    if (j.contains("keywords"))
        c.keywords.keywords = string_list(j, "keywords", "");
    if (j.contains("context_terms"))
        c.keywords.context_terms = string_list(j, "context_terms", "");

    if (j.contains("github")) {
        const auto& g = j["github"];
        check_keys(g, "github", {"mode", "manifest", "api_base", "token", "per_page", "languages"});
        if (g.contains("mode"))
            c.github.mode = get<std::string>(g, "mode", "github.");
        if (c.github.mode != "http" && c.github.mode != "fixture")
            fail("github.mode must be 'http' or 'fixture'");
        if (g.contains("manifest"))
            c.github.manifest = resolve_path(get<std::string>(g, "manifest", "github."), base_dir);
        if (g.contains("api_base"))
            c.github.api_base = get<std::string>(g, "api_base", "github.");
        if (g.contains("token"))
            c.github.token = get<std::string>(g, "token", "github.");
        if (g.contains("per_page"))
            c.github.per_page = static_cast<int>(get<std::int64_t>(g, "per_page", "github."));
        if (g.contains("languages")) {
            c.github.languages.clear();
            for (const auto& name : get<std::vector<std::string>>(g, "languages", "github.")) {
                auto l = parse_language(name);
                if (!l)
                    fail("github.languages: unknown language '" + name + "'");
                c.github.languages.push_back(*l);
            }
        }
    }
    if (j.contains("nvd")) {
        const auto& n = j["nvd"];
        check_keys(n, "nvd", {"mode", "feed_dir", "url_template", "first_year", "last_year", "filter_terms"});
        if (n.contains("mode"))
            c.nvd.mode = get<std::string>(n, "mode", "nvd.");
        if (c.nvd.mode != "http" && c.nvd.mode != "directory")
            fail("nvd.mode must be 'http' or 'directory'");
        if (n.contains("feed_dir"))
            c.nvd.feed_dir = resolve_path(get<std::string>(n, "feed_dir", "nvd."), base_dir);
        if (n.contains("url_template"))
            c.nvd.url_template = get<std::string>(n, "url_template", "nvd.");
        if (n.contains("first_year"))
            c.nvd.first_year = static_cast<int>(get<std::int64_t>(n, "first_year", "nvd."));
        if (n.contains("last_year"))
            c.nvd.last_year = static_cast<int>(get<std::int64_t>(n, "last_year", "nvd."));
        if (n.contains("filter_terms"))
            c.nvd.filter_terms = string_list(n, "filter_terms", "nvd.");
    }
    if (j.contains("tools"))
        parse_tools(j["tools"], c, base_dir);
    return c;
}

void finalize_config(PipelineConfig& c)
{
    auto env = [](const char* name) -> std::optional<std::string> {
        const char* v = std::getenv(name);
        if (!v || !*v)
            return std::nullopt;
        return std::string(v);
    };
    if (auto v = env("AUTOMESC_GITHUB_TOKEN"))
        c.github.token = *v;
    if (auto v = env("AUTOMESC_STORE_PATH"))
        c.store_path = *v;
    if (auto v = env("AUTOMESC_LEDGER_PATH"))
        c.ledger_path = *v;
    if (auto v = env("AUTOMESC_CACHE_DIR"))
        c.cache_dir = *v;
    if (auto v = env("AUTOMESC_TOOL_FIXTURES"))
        c.tool_settings.fixture_dir = *v;

    if (c.poll_interval < std::chrono::minutes(1))
        fail("poll_interval_seconds must be at least 60");
    std::int64_t start = 0;
    try {
        start = miner::parse_iso8601(c.backfill_start);
    } catch (const Error&) {
        fail("backfill_start '" + c.backfill_start + "' is not an ISO-8601 timestamp");
    }
    if (start < miner::parse_iso8601("2016-01-01T00:00:00Z"))
        fail("backfill_start must not precede 2016-01-01T00:00:00Z");
    if (c.nvd.first_year < 2016)
        fail("nvd.first_year must be 2016 or later");
    if (c.nvd.last_year && *c.nvd.last_year < c.nvd.first_year)
        fail("nvd.last_year precedes nvd.first_year");
    if (c.github.mode == "fixture" && c.github.manifest.empty())
        fail("github.mode 'fixture' needs github.manifest");
    if (c.nvd.mode == "directory" && c.nvd.feed_dir.empty())
        fail("nvd.mode 'directory' needs nvd.feed_dir");
    if (c.runner == tools::RunnerKind::Fixture && c.tool_settings.fixture_dir.empty())
        fail("tools.runner 'fixture' needs tools.fixture_dir");
    if (c.keywords.keywords.empty() || c.keywords.context_terms.empty())
        fail("keyword and context-term lists must not be empty");
}

PipelineConfig load_config(const std::optional<std::string>& path)
{
    PipelineConfig c;
    if (path) {
        std::string text;
        try {
            text = util::read_file(*path);
        } catch (const Error& e) {
            fail("cannot read config " + *path + ": " + e.what());
        }
        c = parse_config(text, fs::path(*path).parent_path().string());
    }
    finalize_config(c);
    return c;
}

} // namespace automesc::pipeline
