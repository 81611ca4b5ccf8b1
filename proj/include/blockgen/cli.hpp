#pragma once

#include <string>
#include <vector>

namespace blockgen {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUser = 1;
inline constexpr int kExitInternal = 2;

// Entry point of the command-line tool; args excludes the program name.
int run_cli(const std::vector<std::string>& args);

}  // namespace blockgen
