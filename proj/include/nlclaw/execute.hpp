#pragma once

#include <string>
#include <vector>

#include "nlclaw/config.hpp"
#include "nlclaw/solver.hpp"

namespace nlclaw {

inline constexpr int exit_ok = 0;
inline constexpr int exit_config_error = 1;
inline constexpr int exit_blowup = 2;
inline constexpr int exit_check_failure = 3;

/// Command-specific requirements on top of parse_config (missing [u0],
/// dimension caps, epsilon constraints).
std::vector<ConfigError> validate_for_command(const RunConfig& cfg);

/// Realize the problem a config describes: presets delegate to the lab
/// constructors, explicit configs assemble grid/kernel/mobility/u0 directly.
Problem make_problem(const RunConfig& cfg);

/// Run one command end to end; writes the command's CSVs plus manifest.json
/// into cfg.output.dir and returns a process exit code. config_path is only
/// fingerprinted into the manifest (empty -> hash 0).
int execute(const RunConfig& cfg, const std::string& config_path);

}  // namespace nlclaw
