#pragma once

#include <iosfwd>

namespace qchan {

/// Exit codes of the command-line front end.
enum ExitCode : int {
  kExitOk = 0,
  kExitNumerical = 1,
  kExitValidation = 2,
  kExitUsage = 64,
};

/// Entry point of the qchan tool; human-readable text goes to out, diagnostics to err.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace qchan
