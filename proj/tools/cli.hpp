#pragma once

#include <iosfwd>

namespace rmest::tools {

/// Exit codes of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitSolverFailure = 1;
inline constexpr int kExitInputError = 2;

/// Entry point of `rmest`; returns the process exit code. Diagnostics go to `err`,
/// progress lines to `out`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace rmest::tools
