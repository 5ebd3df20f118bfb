#pragma once

#include <map>
#include <string>
#include <vector>

#include "automesc/tools/runner.hpp"

namespace automesc::tools {

struct RawFinding {
    ToolId tool = ToolId::Slither;
    std::string raw_label;
    std::string path;
    std::size_t line = 0; // 1-based; 0 = file-scoped (the tool gave no line)
    std::string extra;

    bool file_scoped() const { return line == 0; }
    friend bool operator==(const RawFinding&, const RawFinding&) = default;
};

struct ParsedOutput {
    std::vector<RawFinding> findings;
    bool unparseable = false;
    std::string error;
};

// Converts a run's native output into findings. Runs whose status is not Ok
// yield no findings. Unknown detector names are passed through; they unify to
// Unmapped later. Output that does not follow the tool's format is flagged
// unparseable rather than dropped silently.
ParsedOutput parse_output(const ToolRun& run);

// SmartCheck rule id -> the rule's display name used as its raw label.
const std::map<std::string, std::string>& smartcheck_rule_names();

} // namespace automesc::tools
