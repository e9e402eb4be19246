#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace ramified {

/// Exit codes of the command-line tool.
enum ExitCode : int {
  kExitExact = 0,
  kExitHeuristic = 2,
  kExitUsage = 3,
  kExitMalformed = 4,
  kExitCap = 5,
  kExitDomain = 6,
  kExitVerifyFailed = 7,
};

/// Runs the tool on `args` (without the program name). JSON results go to
/// `out` or to the --out file; diagnostics go to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace ramified
