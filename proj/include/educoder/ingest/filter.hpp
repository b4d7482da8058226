#pragma once

#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "educoder/core/model.hpp"

namespace educoder::ingest {

struct UtteranceFilter {
  std::optional<std::string> keyword;  // case-insensitive substring of the text
  std::optional<std::set<std::string>> speakers;
  std::optional<std::string> segment;
  std::optional<std::pair<core::LineNumber, core::LineNumber>> line_range;  // inclusive
};

/// Ascending line numbers matching every present criterion. Throws
/// Error(lineRangeOutOfBounds) unless 1 <= start <= end <= N.
[[nodiscard]] std::vector<core::LineNumber> apply_filter(const core::Transcript& transcript,
                                                         const UtteranceFilter& filter);

}  // namespace educoder::ingest
