#pragma once

// Command-line entry point shared by the ealign binary and the tests.
// Exit codes: 0 success, 1 assertion failure, 2 usage or config error,
// 3 numerical abort.

#include <iosfwd>

namespace ealign::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitAssertion = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitNumerical = 3;

int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ealign::cli
