#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hkg::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

// Entry point shared by the `hkg` binary and the in-process CLI tests.
// Results go to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hkg::cli
