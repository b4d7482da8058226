#pragma once

#include <chrono>
#include <string>
#include <string_view>

namespace educoder {

using Timestamp = std::chrono::sys_time<std::chrono::milliseconds>;

[[nodiscard]] Timestamp now_utc();

/// "2026-10-15T11:47:03.120Z"
[[nodiscard]] std::string to_iso8601(Timestamp t);

/// Accepts the form produced by to_iso8601, with or without the
/// milliseconds part. Throws educoder::Error(validation) otherwise.
[[nodiscard]] Timestamp parse_iso8601(std::string_view text);

}  // namespace educoder
