#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace blowup {

inline constexpr int exit_ok = 0;
inline constexpr int exit_usage = 2;
inline constexpr int exit_inconclusive = 3;
inline constexpr int exit_violation = 4;

/// The command line refuses sigma below this; closer to 2 the orbits out of P2 become too slow.
inline constexpr double cli_sigma_min = 2.0 + 1e-3;

std::string tool_version();

/// Runs one command. `args` excludes the program name. Reports go to `out`, diagnostics to `err`;
/// the return value is the process exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace blowup
