#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cvxrich::cli {

/// Exit codes: 0 success, 1 input or usage error, 2 numerical failure.
enum ExitCode : int { kOk = 0, kInputError = 1, kNumericalError = 2 };

/// Runs the command line given without the program name. Normal output goes
/// to `out`, diagnostics and progress to `err`.
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

}  // namespace cvxrich::cli
