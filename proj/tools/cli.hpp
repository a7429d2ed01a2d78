#pragma once

#include <iosfwd>

namespace rbl::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitAcceptance = 3;

/// Entry point shared by the executable and the tests. Results go to `out`
/// unless --out names a file; diagnostics go to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace rbl::cli
