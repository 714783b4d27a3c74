#pragma once

#include <ostream>

namespace qread::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitNumeric = 3;

/// Environment variable holding the default worker count for scans.
inline constexpr const char* kThreadsEnv = "QREAD_THREADS";

/// Entry point of the `qread` tool. Subcommands: bounds, scan, bell,
/// threshold, overhead, oracle. Returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace qread::cli
