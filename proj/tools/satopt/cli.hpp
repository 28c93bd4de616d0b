#pragma once

#include <string>
#include <vector>

namespace satopt::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitNotConverged = 1;  // a solve failed or hit the iteration cap
inline constexpr int kExitUsage = 2;         // bad flags or config

/// Entry point of the `satopt` tool; args[0] is the program name.
int run(const std::vector<std::string>& args);

/// Comma-separated numbers, or start:stop:step (inclusive, step > 0).
/// Throws std::invalid_argument on malformed or empty input.
std::vector<double> parse_grid(const std::string& text);

}  // namespace satopt::cli
