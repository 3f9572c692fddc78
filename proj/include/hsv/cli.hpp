#pragma once

// Job runner behind the hsv command-line tool.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hsv {

inline constexpr std::string_view tool_version = "0.1.0";

/// verify-covering, fixed-points, periodic-orbits, chaos-report,
/// branch-track, cutting-lab.
const std::vector<std::string_view>& commands();

/// Command-line overrides; unset fields fall back to the config file, then
/// to built-in defaults.
struct RunOptions {
    std::string config_path;
    std::optional<std::string> out_path;
    std::optional<std::string> csv_path;
    std::optional<double> tol;
    std::optional<std::uint64_t> max_period;
    std::optional<std::uint64_t> budget;
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> workers;
    std::optional<bool> strict_strips;
};

enum ExitCode : int {
    exit_certified = 0,
    exit_falsified = 2,
    exit_inconclusive = 3,
    exit_usage = 4,
};

struct RunResult {
    int exit_code = exit_usage;
    /// JSON document, keys sorted.
    std::string report;
    std::string csv;
};

/// Throws ParseError (or another hsv::Error) for configuration problems.
RunResult execute(std::string_view command, const RunOptions& opt);

/// execute() plus file output. Diagnostics go to `err`; the report goes to
/// --out when given, otherwise to `out`. Returns the exit code.
int run(std::string_view command, const RunOptions& opt, std::ostream& out, std::ostream& err);

} // namespace hsv
