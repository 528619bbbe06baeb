#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cpfix/problem_io.hpp"

namespace cpfix {

/// Report plus the process exit code it implies: 0 when every entry is PASS
/// or SKIPPED, 1 when some entry is FAIL, 2 when some entry is ERROR.
struct CommandOutput {
    int exit_code = 0;
    Json report;
};

CommandOutput cmd_validate(const ProblemFile& problem);
CommandOutput cmd_analyze(const ProblemFile& problem);
CommandOutput cmd_dilation(const ProblemFile& problem);

/// Report for a command that could not start (unreadable or malformed file).
CommandOutput error_output(const std::string& command, const std::exception& e);

struct DemoParams {
    std::size_t n = 2;
    std::size_t m = 2;
    std::size_t d = 1;
    std::size_t terms = 3;
    std::vector<std::size_t> blocks;  // empty: family default
    std::optional<double> theta;      // rotation angle, or tail-shift phases
    double gamma = 0.5;
    std::uint64_t seed = 0;
};

/// Families: tail-shift, rotation, damping, random-mixture, random-dilation.
/// Throws UnknownFamily for anything else.
ProblemFile cmd_demo(const std::string& family, const DemoParams& params);
const std::vector<std::string>& demo_families();

/// Human-readable table for a report.
std::string render_table(const Json& report);

} // namespace cpfix
