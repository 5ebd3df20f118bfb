#pragma once

#include <chrono>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "automesc/core/types.hpp"
#include "automesc/lexing/source.hpp"

namespace automesc::tools {

enum class ExitStatus { Ok, ToolError, Timeout, UnsupportedLanguage };

std::string_view to_string(ExitStatus status);
std::optional<ExitStatus> parse_exit_status(std::string_view s);

struct ToolRun {
    ToolId tool = ToolId::Slither;
    std::string target_path;
    std::string content_hash; // sha256 of the analyzed content
    std::string started_at;   // ISO-8601 UTC
    double duration_seconds = 0.0;
    ExitStatus exit_status = ExitStatus::Ok;
    std::string raw_output; // verbatim, kept for audit
};

enum class RunnerKind { Container, Fixture };

std::optional<RunnerKind> parse_runner_kind(std::string_view s);

struct ContainerSpec {
    std::string image;
    // Arguments after the image; "{file}" is replaced by the in-container path.
    std::vector<std::string> command;
};

struct ToolSettings {
    std::string fixture_dir;
    std::string container_executable = "docker";
    std::map<ToolId, ContainerSpec> containers;
    // Tools that accept Vyper input. None of the seven do by default.
    std::set<ToolId> vyper_support;
    std::chrono::seconds timeout{120};
    std::size_t concurrency = 4;
};

// Runs or replays one tool on one file. Files in a language the tool does not
// support return UnsupportedLanguage without invoking anything. Fixture mode
// replays <fixture_dir>/<Tool>/<content-hash>.out and throws
// Error(FixtureMissing) when it is absent. Container mode mounts the file
// read-only and throws Error(ImageMissing) when the tool has no image; a run
// exceeding the timeout is recorded with ExitStatus::Timeout.
ToolRun run_tool(ToolId tool, const lexing::SourceFile& file, RunnerKind runner, const ToolSettings& settings);

// Runs every tool on `file` with at most settings.concurrency runs in flight.
// A missing fixture or image is recorded as ToolError with the reason as
// output. Results are in kAllTools order.
std::vector<ToolRun> run_all_tools(const lexing::SourceFile& file, RunnerKind runner, const ToolSettings& settings);

std::string content_hash(std::string_view content);

} // namespace automesc::tools
