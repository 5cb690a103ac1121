#pragma once

#include "onsager/degree_engine.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace onsager {

const char* library_version();

/// Exit codes of the command-line tool.
enum ExitCode : int { kExitOk = 0, kExitIo = 1, kExitRefusal = 2 };

struct RunConfig {
    std::string kernel = "onsager:32";
    std::optional<double> lambda;  // command-specific default when unset
    double lambda_max = 10.0;
    int n_lo = 8;                  // --n 8 or --n 2..12
    int n_hi = 8;
    int grid = 0;                  // 0: max(256, 8N)
    double radius_margin = 0.5;
    std::optional<double> radius;  // overrides lambda ||K|| + margin
    int starts = 0;                // 0: 64 N
    std::uint64_t seed = 20240611;
    std::string out;               // empty: print JSON to stdout
    std::vector<std::string> formats{"json"};

    MultistartConfig multistart() const;
    bool level_range() const { return n_hi != n_lo; }
};

/// Parses "8" or "2..12" into (lo, hi).
std::pair<int, int> parse_level_range(const std::string& text);

/// Keys mirror the long flag names with '-' replaced by '_'.
RunConfig config_from_json(const nlohmann::json& j, RunConfig base = {});
nlohmann::json config_to_json(const RunConfig& c);
void validate(const RunConfig& c);

struct CommandResult {
    int exit_code = kExitOk;
    nlohmann::json artifact;
    std::string csv;  // bifurcate only
    std::string svg;  // bifurcate only
};

CommandResult cmd_solve(const RunConfig& c);
CommandResult cmd_degree(const RunConfig& c);
CommandResult cmd_bifurcate(const RunConfig& c);
CommandResult cmd_verify(const RunConfig& c);

/// Dispatches by name and maps exceptions to exit codes: MathRefusal -> 2,
/// configuration and I/O problems -> 1. Refusals still produce an artifact.
CommandResult run_command(const std::string& command, const RunConfig& c);

/// Writes <out>/<command>.json (+ .csv/.svg when requested), or the JSON to
/// `console` when no output directory is configured. Returns false on I/O failure.
bool write_outputs(const std::string& command, const CommandResult& r, const RunConfig& c,
                   std::ostream& console);

/// Stable text form of an artifact (2-space indent, trailing newline).
std::string dump_artifact(const nlohmann::json& artifact);

}  // namespace onsager
