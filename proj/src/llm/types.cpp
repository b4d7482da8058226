#include "educoder/llm/types.hpp"

#include <set>

#include "educoder/core/error.hpp"

namespace educoder::llm {

std::string_view to_string(RunStatus s) noexcept {
  switch (s) {
    case RunStatus::running: return "running";
    case RunStatus::complete: return "complete";
    case RunStatus::partial: return "partial";
    case RunStatus::failed: return "failed";
  }
  return "failed";
}

RunStatus run_status_from_string(std::string_view s) {
  if (s == "running") return RunStatus::running;
  if (s == "complete") return RunStatus::complete;
  if (s == "partial") return RunStatus::partial;
  if (s == "failed") return RunStatus::failed;
  throw Error(errc::validation, "unknown run status: " + std::string(s), "status");
}

std::string llm_annotator_id(const LlmRunConfig& config) {
  return std::string(core::kLlmPrefix) + config.provider_id + ":" + config.model;
}

void validate_config(const LlmRunConfig& config, const core::Codebook& codebook, const core::Transcript& transcript) {
  auto fail = [](const std::string& message, const char* field) { throw Error(errc::invalid_config, message, field); };
  if (config.provider_id.empty()) fail("providerId is empty", "providerId");
  if (config.model.empty()) fail("model is empty", "model");
  if (config.features.empty()) fail("select at least one feature", "features");
  std::set<std::string> seen;
  for (const auto& f : config.features) {
    const auto* def = codebook.find(f);
    if (def == nullptr) fail("unknown code " + f, "features");
    if (def->value_kind != core::ValueKind::binary) fail("code " + f + " is free text; only binary codes can be requested", "features");
    if (!seen.insert(f).second) fail("code " + f + " listed twice", "features");
  }
  const auto [start, end] = config.line_range;
  if (start < 1 || start > end || end > transcript.line_count()) {
    fail("lineRange must satisfy 1 <= start <= end <= " + std::to_string(transcript.line_count()), "lineRange");
  }
  if (!(config.temperature >= 0.0)) fail("temperature must be >= 0", "temperature");
  if (config.max_retries < 0 || config.max_retries > 10) fail("maxRetries must lie in 0..10", "maxRetries");
}

}  // namespace educoder::llm
