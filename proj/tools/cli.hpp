#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ciss::cli {

enum ExitCode : int {
  kOk = 0,
  kIoError = 1,
  kUsageError = 2,
  kClassicalViolation = 3,
  kInfeasible = 4,
  kInsufficientStatistics = 5,
};

/// Runs one invocation; args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

}  // namespace ciss::cli
