#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sphlab::cli {

/// Exit codes shared by every subcommand.
enum ExitCode : int {
  kSuccess = 0,
  kNegative = 1,  // the run completed and the answer is "no"
  kUsage = 2,     // bad arguments, unreadable or malformed input, IO failure
};

/// Runs the command line `args` (args[0] is the program name) in process.
/// Results go to `out` unless an output file is requested; diagnostics go to
/// `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sphlab::cli
