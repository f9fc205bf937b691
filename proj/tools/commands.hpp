#pragma once

#include <iosfwd>

namespace f0priv::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitUsage = 2;

/// Entry point of `f0priv <extract|modify|stats|eval|plot> [flags]`.
/// Returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace f0priv::cli
