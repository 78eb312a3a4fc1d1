#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ccnrank::cli {

enum ExitCode : int {
  kSuccess = 0,
  kIoFailure = 1,
  kUsageError = 2,
  kNumericalFailure = 3,
  kVerificationFailure = 4,
};

/// Runs one command line (without the program name). Results go to `out`,
/// progress and diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ccnrank::cli
