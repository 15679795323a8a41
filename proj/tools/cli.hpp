#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace consortium::tools {

enum ExitCode : int {
  kExitOk = 0,
  kExitIo = 1,
  kExitValidation = 2,
  kExitInfeasible = 3,
  kExitNumerical = 4,
};

/// Runs the `consortium` command line. `args` excludes the program name.
/// Human-readable progress goes to `out`, diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace consortium::tools
