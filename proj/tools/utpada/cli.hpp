#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace utpada::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitViolations = 1;
inline constexpr int kExitExecution = 2;
inline constexpr int kExitStore = 3;
inline constexpr int kExitUsage = 64;

// Runs one `utpada` invocation. args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace utpada::cli
