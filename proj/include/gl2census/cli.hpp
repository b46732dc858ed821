#pragma once

// Command-line front end: enumerate, classify, census, density, sieve.

#include <ostream>

namespace gl2census {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitStore = 3;

/// Runs one subcommand. CSV goes to `out`, diagnostics to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace gl2census
