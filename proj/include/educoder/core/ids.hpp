#pragma once

#include <string>

namespace educoder::core {

/// `bytes` cryptographically random bytes as lowercase hex.
[[nodiscard]] std::string random_hex(std::size_t bytes);

}  // namespace educoder::core
