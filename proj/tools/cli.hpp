#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hsparse::cli {

// Stable exit-code contract of the command-line tool.
enum ExitCode : int {
  kSuccess = 0,
  kVerificationFailed = 1,
  kUsageError = 2,
  kNumericFailure = 3,
};

/// Runs one command line (args[0] is the program name) and returns its exit
/// code. Normal output goes to `out`, diagnostics and warnings to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hsparse::cli
