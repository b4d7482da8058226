#include "educoder/core/model.hpp"

#include <algorithm>

#include "educoder/core/error.hpp"

namespace educoder::core {

std::vector<Segment> derive_segments(const std::vector<Utterance>& utterances) {
  std::vector<Segment> out;
  for (const auto& u : utterances) {
    if (!u.segment) continue;
    if (!out.empty() && out.back().label == *u.segment && out.back().end_line == u.line - 1) {
      out.back().end_line = u.line;
    } else {
      out.push_back({*u.segment, u.line, u.line});
    }
  }
  return out;
}

const CodeDefinition* Codebook::find(std::string_view code_id) const noexcept {
  auto it = std::find_if(codes.begin(), codes.end(), [&](const CodeDefinition& c) { return c.code_id == code_id; });
  return it == codes.end() ? nullptr : &*it;
}

std::vector<std::string> Codebook::categories() const {
  std::vector<std::string> out;
  for (const auto& c : codes) {
    if (c.category && std::find(out.begin(), out.end(), *c.category) == out.end()) out.push_back(*c.category);
  }
  return out;
}

void validate_settings(const ProjectSettings& settings) {
  if (!(settings.low_agreement_threshold >= -1.0 && settings.low_agreement_threshold <= 1.0)) {
    throw Error(errc::validation, "lowAgreementThreshold must lie in [-1, 1]", "lowAgreementThreshold");
  }
}

const Annotator* Project::find_annotator(std::string_view id) const noexcept {
  auto it = std::find_if(annotators.begin(), annotators.end(), [&](const Annotator& a) { return a.id == id; });
  return it == annotators.end() ? nullptr : &*it;
}

std::string_view to_string(AttachmentKind k) noexcept {
  switch (k) {
    case AttachmentKind::instructions: return "instructions";
    case AttachmentKind::image: return "image";
    case AttachmentKind::other: return "other";
  }
  return "other";
}

std::string_view to_string(ValueKind k) noexcept { return k == ValueKind::binary ? "binary" : "freeText"; }

std::string_view to_string(RaterKind k) noexcept { return k == RaterKind::human ? "human" : "llm"; }

std::string_view to_string(PoolingMode m) noexcept {
  switch (m) {
    case PoolingMode::per_code_mean: return "perCodeMean";
    case PoolingMode::pooled_cells: return "pooledCells";
    case PoolingMode::both: return "both";
  }
  return "both";
}

AttachmentKind attachment_kind_from_string(std::string_view s) {
  if (s == "instructions") return AttachmentKind::instructions;
  if (s == "image") return AttachmentKind::image;
  if (s == "other") return AttachmentKind::other;
  throw Error(errc::validation, "unknown attachment kind: " + std::string(s), "kind");
}

ValueKind value_kind_from_string(std::string_view s) {
  if (s == "binary") return ValueKind::binary;
  if (s == "freeText" || s == "free_text") return ValueKind::free_text;
  throw Error(errc::invalid_value_kind, "value_kind must be binary or free_text, got: " + std::string(s),
              "value_kind");
}

RaterKind rater_kind_from_string(std::string_view s) {
  if (s == "human") return RaterKind::human;
  if (s == "llm") return RaterKind::llm;
  throw Error(errc::validation, "unknown rater kind: " + std::string(s), "kind");
}

PoolingMode pooling_mode_from_string(std::string_view s) {
  if (s == "perCodeMean") return PoolingMode::per_code_mean;
  if (s == "pooledCells") return PoolingMode::pooled_cells;
  if (s == "both") return PoolingMode::both;
  throw Error(errc::validation, "irrPoolingMode must be perCodeMean, pooledCells or both", "irrPoolingMode");
}

}  // namespace educoder::core
