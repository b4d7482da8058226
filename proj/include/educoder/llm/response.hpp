#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "educoder/core/model.hpp"
#include "educoder/llm/types.hpp"

namespace educoder::llm {

struct ParsedResponse {
  std::vector<core::AnnotationCell> cells;  // sorted by (line, code)
  std::vector<std::string> warnings;
};

/// Byte span [first, last) of the first balanced bracket region in `raw` that
/// parses as a JSON array which is empty or holds at least one object. Prose
/// such as "see [1]" or "[note]" is skipped.
[[nodiscard]] std::optional<std::pair<std::size_t, std::size_t>> find_json_array(std::string_view raw);

/// Extracts cells from a model reply. Elements outside the configured lines
/// or features, or with the wrong field types, are skipped with a warning; a
/// repeated (line, code) keeps the last element. Throws
/// Error(noJsonArrayFound).
[[nodiscard]] ParsedResponse parse_llm_response(std::string_view raw, const LlmRunConfig& config);

}  // namespace educoder::llm
