#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace keraia::cli {

// Exit codes: 0 success, 1 domain error, 2 usage error.
inline constexpr int kOk = 0;
inline constexpr int kDomainError = 1;
inline constexpr int kUsageError = 2;

// Runs the command line `args` (without the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace keraia::cli
