#pragma once

#include <iosfwd>

namespace krein::cli {

enum ExitCode : int {
  kPass = 0,
  kSuiteFail = 1,
  kInputError = 2,
  kNotDissipative = 3,
  kNoConvergence = 4,
};

/// Runs the command line; all output goes through `out` and `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace krein::cli
