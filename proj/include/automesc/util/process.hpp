#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <vector>

namespace automesc::util {

struct ProcessResult {
    int exit_code = -1;
    bool timed_out = false;
    std::string out;
    std::string err;
};

struct ProcessOptions {
    std::optional<std::string> cwd;
    std::optional<std::chrono::milliseconds> timeout;
    // Extra NAME=VALUE entries appended to the inherited environment.
    std::vector<std::string> env;
    std::optional<std::string> stdin_data;
};

// Runs argv[0] (searched on PATH) without a shell. Throws Error(IoError) if the
// process cannot be spawned. A process exceeding the timeout is SIGKILLed and
// reported with timed_out = true.
ProcessResult run_process(const std::vector<std::string>& argv, const ProcessOptions& options = {});

} // namespace automesc::util
