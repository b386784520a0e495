#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace qmod::cli {

enum ExitCode : int {
  ok = 0,
  verification_failed = 1,
  usage_error = 2,
  not_converged = 3,
};

/// Runs `qmodular args...` (args excludes the program name). JSON and CSV
/// go to `out` unless --out names a file; diagnostics go to `err`.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qmod::cli
