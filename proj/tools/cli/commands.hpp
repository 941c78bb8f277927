#pragma once

#include <iosfwd>
#include <string>

#include "cli/config.hpp"

namespace deadbeat::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitValidation = 2,
  kExitRuntime = 3,
  kExitDegenerate = 4,
};

enum class SweepMode { kPhase, kHorizon };

/// Each command writes files under cfg.output_prefix and a short report to
/// `log`. Errors propagate; run_cli maps them to exit codes.
void cmd_simulate(const ScenarioConfig& cfg, std::ostream& log);
void cmd_sweep(const ScenarioConfig& cfg, SweepMode mode, std::ostream& log);
void cmd_observability(const ScenarioConfig& cfg, std::ostream& log);

int exit_code_for(const std::exception& e);

int run_cli(int argc, char** argv);

}  // namespace deadbeat::cli
