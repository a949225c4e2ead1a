#pragma once

#include <ostream>

namespace batchq::cli {

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitCompareFailed = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitDomain = 3;
inline constexpr int kExitConfig = 4;

// Entry point of the `batchq` tool. Diagnostics go to `err`; CSV written to
// "-" goes to `out`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace batchq::cli
