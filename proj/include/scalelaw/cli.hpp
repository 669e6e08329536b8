#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace scalelaw::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUserError = 1;
inline constexpr int kExitNumericalFailure = 2;

/// Entry point shared by the executable and the tests. `args` includes the
/// program name. Returns the process exit status.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace scalelaw::cli
