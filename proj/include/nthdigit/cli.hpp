#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace nthdigit {

/// Exit codes of the nth_digits tool. No other values are returned.
enum ExitCode : int {
  kExitOk = 0,
  kExitMismatch = 1,
  kExitUsage = 2,
  kExitLowConfidence = 3,
  kExitOverflow = 4,
};

/// Runs the command line `args` (without the program name).
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace nthdigit
