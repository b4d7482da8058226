#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace educoder::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitTransport = 3;

/// args excludes the program name. Machine output goes to `out`,
/// diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace educoder::cli
