#include "automesc/tools/runner.hpp"

#include <filesystem>
#include <future>
#include <random>

#include "automesc/miner/git.hpp"
#include "automesc/util/error.hpp"
#include "automesc/util/hash.hpp"
#include "automesc/util/process.hpp"
#include "automesc/util/strings.hpp"

namespace automesc::tools {

namespace fs = std::filesystem;

std::string_view to_string(ExitStatus status)
{
    switch (status) {
    case ExitStatus::Ok: return "ok";
    case ExitStatus::ToolError: return "tool_error";
    case ExitStatus::Timeout: return "timeout";
    case ExitStatus::UnsupportedLanguage: return "unsupported_language";
    }
    return "?";
}

std::optional<ExitStatus> parse_exit_status(std::string_view s)
{
    for (auto e : {ExitStatus::Ok, ExitStatus::ToolError, ExitStatus::Timeout, ExitStatus::UnsupportedLanguage})
        if (to_string(e) == s)
            return e;
    return std::nullopt;
}

std::optional<RunnerKind> parse_runner_kind(std::string_view s)
{
    if (s == "fixture")
        return RunnerKind::Fixture;
    if (s == "container")
        return RunnerKind::Container;
    return std::nullopt;
}

std::string content_hash(std::string_view content)
{
    return util::sha256_hex(content);
}

namespace {

class TempDir {
public:
    TempDir()
    {
        std::random_device rd;
        for (int attempt = 0; attempt < 16; ++attempt) {
            auto p = fs::temp_directory_path() / ("automesc-" + std::to_string(rd()));
            if (fs::create_directory(p)) {
                path_ = p;
                return;
            }
        }
        throw Error(ErrorCode::IoError, "cannot create temporary directory");
    }
    ~TempDir()
    {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const fs::path& path() const { return path_; }

private:
    fs::path path_;
};

} // namespace

ToolRun run_tool(ToolId tool, const lexing::SourceFile& file, RunnerKind runner, const ToolSettings& settings)
{
    ToolRun run;
    run.tool = tool;
    run.target_path = file.path;
    run.content_hash = content_hash(file.content);
    run.started_at = miner::format_iso8601_utc(std::time(nullptr));

    if (file.language == Language::Vyper && !settings.vyper_support.count(tool)) {
        run.exit_status = ExitStatus::UnsupportedLanguage;
        return run;
    }

    const auto start = std::chrono::steady_clock::now();
    if (runner == RunnerKind::Fixture) {
        const auto path = fs::path(settings.fixture_dir) / std::string(to_string(tool)) / (run.content_hash + ".out");
        if (!fs::exists(path))
            throw Error(ErrorCode::FixtureMissing, path.string() + " (for " + file.path + ")");
        run.raw_output = util::read_file(path.string());
        run.exit_status = ExitStatus::Ok;
        return run;
    }

    auto spec = settings.containers.find(tool);
    if (spec == settings.containers.end() || spec->second.image.empty())
        throw Error(ErrorCode::ImageMissing, "no container image configured for " + std::string(to_string(tool)));

    TempDir dir;
    const std::string name = fs::path(file.path).filename().string();
    util::write_file((dir.path() / name).string(), file.content);
    std::vector<std::string> argv{settings.container_executable, "run", "--rm", "--network", "none",
                                  "-v", dir.path().string() + ":/contract:ro", spec->second.image};
    for (auto arg : spec->second.command) {
        auto pos = arg.find("{file}");
        if (pos != std::string::npos)
            arg.replace(pos, 6, "/contract/" + name);
        argv.push_back(arg);
    }
    util::ProcessOptions po;
    po.timeout = settings.timeout;
    auto res = util::run_process(argv, po);
    run.duration_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    run.raw_output = res.out;
    if (res.timed_out)
        run.exit_status = ExitStatus::Timeout;
    else if (res.out.empty() && res.exit_code != 0) {
        // Analyzers commonly exit non-zero when they report findings, so only
        // a silent failure counts as a tool error.
        run.exit_status = ExitStatus::ToolError;
        run.raw_output = res.err;
    } else
        run.exit_status = ExitStatus::Ok;
    return run;
}

std::vector<ToolRun> run_all_tools(const lexing::SourceFile& file, RunnerKind runner, const ToolSettings& settings)
{
    auto guarded = [&](ToolId tool) {
        try {
            return run_tool(tool, file, runner, settings);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::FixtureMissing && e.code() != ErrorCode::ImageMissing)
                throw;
            ToolRun run;
            run.tool = tool;
            run.target_path = file.path;
            run.content_hash = content_hash(file.content);
            run.exit_status = ExitStatus::ToolError;
            run.raw_output = e.what();
            return run;
        }
    };

    std::vector<ToolRun> runs;
    const std::size_t limit = std::max<std::size_t>(1, settings.concurrency);
    for (std::size_t i = 0; i < kAllTools.size(); i += limit) {
        std::vector<std::future<ToolRun>> batch;
        for (std::size_t j = i; j < std::min(kAllTools.size(), i + limit); ++j)
            batch.push_back(std::async(std::launch::async, guarded, kAllTools[j]));
        for (auto& f : batch)
            runs.push_back(f.get());
    }
    return runs;
}

} // namespace automesc::tools
