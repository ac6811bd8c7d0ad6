#pragma once

#include <ostream>

namespace benchdiag::cli {

// Process exit codes. Stable contract for scripts driving the tool.
enum ExitCode : int {
  kClean = 0,
  kUsage = 1,
  kInputError = 2,
  kOutputError = 3,
  kDiagnosticFailure = 4,
};

// Entry point behind the benchdiag executable; argv[0] is the program name.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace benchdiag::cli
