#pragma once

#include <ostream>

namespace lpsup::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFlagged = 1;
inline constexpr int kExitInvalidInput = 2;
inline constexpr int kExitRuntime = 3;

/// Entry point of the `lpsup` tool; JSON errors go to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace lpsup::cli
