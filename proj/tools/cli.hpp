#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pat::cli {

// Process exit codes.
inline constexpr int exit_ok = 0;
inline constexpr int exit_config = 2;
inline constexpr int exit_data = 3;
inline constexpr int exit_numeric = 4;

/// Runs the command line `args` (without the program name). Messages go to
/// `out`/`err`; the return value is the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace pat::cli
