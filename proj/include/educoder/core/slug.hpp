#pragma once

#include <set>
#include <string>
#include <string_view>

namespace educoder::core {

/// Lowercases `name` and collapses every run of non-alphanumeric ASCII
/// characters into one hyphen, trimming hyphens at both ends. Bytes >= 0x80
/// (UTF-8 continuation of non-ASCII letters) are kept as-is. A name that
/// reduces to nothing becomes "code". Throws Error(validation) for a name that
/// is empty after trimming.
[[nodiscard]] std::string make_code_slug(std::string_view name);

/// As above, then appends "-2", "-3", ... until the slug is not in `taken`.
[[nodiscard]] std::string make_code_slug(std::string_view name, const std::set<std::string>& taken);

[[nodiscard]] std::string trim(std::string_view s);
[[nodiscard]] std::string to_lower_ascii(std::string_view s);

}  // namespace educoder::core
