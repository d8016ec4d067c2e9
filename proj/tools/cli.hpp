#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace dem::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitVerificationFailed = 1;
inline constexpr int kExitUsage = 2;

/// Runs the `dem` command line with args (excluding the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dem::cli
