#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cascada::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// Runs the command line; args[0] is the program name. Normal output goes
/// to `out`, diagnostics and usage to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

}  // namespace cascada::cli
