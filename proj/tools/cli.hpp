#pragma once

#include <iosfwd>

namespace lightlayers::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

/// Parses argv and runs one subcommand. Normal output goes to `out`,
/// diagnostics and --verbose progress to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace lightlayers::cli
