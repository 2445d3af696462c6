#pragma once

#include "run_config.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace facegen::cli {

struct Command {
  std::string name;
  std::string summary;
};

const std::vector<Command>& commands();

// Runs one subcommand. Throws ConfigError for validation failures and
// facegen::Error for module failures.
void run_command(const std::string& name, const RunConfig& config, std::ostream& log);

}  // namespace facegen::cli
