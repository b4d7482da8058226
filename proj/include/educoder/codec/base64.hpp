#pragma once

#include <string>
#include <string_view>

namespace educoder::codec {

[[nodiscard]] std::string base64_encode(std::string_view bytes);
/// Throws Error(validation) on malformed input.
[[nodiscard]] std::string base64_decode(std::string_view text);

}  // namespace educoder::codec
