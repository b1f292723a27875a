#pragma once

#include <ostream>

namespace phishdet::cli {

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;
inline constexpr int kExitDiverged = 3;

// Entry point of the phishdet tool; never throws.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace phishdet::cli
