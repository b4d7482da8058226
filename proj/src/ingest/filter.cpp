#include "educoder/ingest/filter.hpp"

#include "educoder/core/error.hpp"
#include "educoder/core/slug.hpp"

namespace educoder::ingest {

std::vector<core::LineNumber> apply_filter(const core::Transcript& transcript, const UtteranceFilter& filter) {
  const core::LineNumber n = transcript.line_count();
  core::LineNumber first = 1;
  core::LineNumber last = n;
  if (filter.line_range) {
    const auto [start, end] = *filter.line_range;
    if (start < 1 || start > end || end > n) {
      throw Error(errc::line_range_out_of_bounds,
                  "line range " + std::to_string(start) + ".." + std::to_string(end) + " not within 1.." +
                      std::to_string(n),
                  "lineRange");
    }
    first = start;
    last = end;
  }
  const std::string needle = filter.keyword ? core::to_lower_ascii(*filter.keyword) : std::string{};

  std::vector<core::LineNumber> out;
  for (core::LineNumber line = first; line <= last; ++line) {
    const auto& u = transcript.at_line(line);
    if (filter.speakers && !filter.speakers->contains(u.speaker)) continue;
    if (filter.segment && u.segment != filter.segment) continue;
    if (!needle.empty() && core::to_lower_ascii(u.text).find(needle) == std::string::npos) continue;
    out.push_back(line);
  }
  return out;
}

}  // namespace educoder::ingest
