#pragma once
// Read-side views computed from a single snapshot. The HTTP handlers and the
// command-line tool both go through these, so their output matches.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "educoder/codec/json_codec.hpp"
#include "educoder/irr/report.hpp"
#include "educoder/store/store.hpp"

namespace educoder::api {

struct IrrQuery {
  std::optional<std::vector<std::string>> raters;  // default: every member
  std::optional<std::vector<std::string>> codes;   // default: every binary code
  bool include_llm = false;                        // explicitly listed LLM raters are always kept
};

/// Throws Error(validation) naming "raters" or "codes" for an unknown entry.
[[nodiscard]] irr::AgreementReport irr_report(const store::Snapshot& snapshot, const IrrQuery& query);
[[nodiscard]] codec::Json irr_report_json(const store::Snapshot& snapshot, const IrrQuery& query);

struct ComparisonQuery {
  std::optional<std::pair<core::LineNumber, core::LineNumber>> range;
  bool include_llm = true;
};

/// Per-line grid of every rater's values plus the disagreeing
/// (line, code) cells. Throws Error(lineRangeOutOfBounds).
[[nodiscard]] codec::Json comparison_json(const store::Snapshot& snapshot, const ComparisonQuery& query);

/// Project resource without transcript rows or material bytes.
[[nodiscard]] codec::Json project_json(const store::Snapshot& snapshot);

/// Splits "a,b,,c" into {"a","b","c"} after trimming.
[[nodiscard]] std::vector<std::string> split_list(std::string_view text);

}  // namespace educoder::api
