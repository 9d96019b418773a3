#pragma once

#include <string>
#include <vector>

#include "dryfric/run_config.hpp"

namespace dryfric::commands {

/// Files written under config.output_dir plus a short report for humans.
struct CommandResult {
  std::vector<std::string> files;
  std::string summary;
};

CommandResult cmd_simulate(const RunConfig& config);
CommandResult cmd_solve(const RunConfig& config);
CommandResult cmd_durations(const RunConfig& config);
CommandResult cmd_psd(const RunConfig& config);
CommandResult cmd_extrapolate(const RunConfig& config);
CommandResult cmd_kappa(const RunConfig& config);

/// Dispatch by subcommand name; throws InvalidArgument for unknown names.
CommandResult run(const std::string& name, const RunConfig& config);

const std::vector<std::string>& command_names();

}  // namespace dryfric::commands
