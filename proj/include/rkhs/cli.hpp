#pragma once

#include <iosfwd>

namespace rkhs::cli {

/// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kInputError = 1;
inline constexpr int kNumericalBreakdown = 2;
inline constexpr int kReproductionFailure = 3;

/// Runs the command line `argv[0] <subcommand> ...`, writing results to
/// `out` (unless redirected with --out) and diagnostics to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace rkhs::cli
