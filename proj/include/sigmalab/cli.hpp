#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sigmalab::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFinding = 1;
inline constexpr int kExitUsage = 2;

/// Entry point shared by the sigmalab binary and the end-to-end tests.
/// args[0] is the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace sigmalab::cli
