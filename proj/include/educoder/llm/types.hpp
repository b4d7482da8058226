#pragma once

#include <optional>
#include <string>
#include <vector>

#include "educoder/core/model.hpp"

namespace educoder::llm {

struct LineRange {
  core::LineNumber start = 1;
  core::LineNumber end = 1;

  friend bool operator==(const LineRange&, const LineRange&) = default;
};

struct LlmRunConfig {
  std::string provider_id;
  std::string model;
  std::vector<std::string> features;  // binary code ids
  LineRange line_range;
  std::string prompt_template;
  bool include_context_materials = false;
  double temperature = 0.0;
  int max_retries = 2;

  friend bool operator==(const LlmRunConfig&, const LlmRunConfig&) = default;
};

/// Binding of a provider id to its endpoint and the environment variable that
/// holds its key. The key itself is never stored.
struct LlmProviderBinding {
  std::string provider_id;
  std::string endpoint_url;
  std::string api_key_ref;
  int request_timeout_seconds = 60;
};

enum class RunStatus { running, complete, partial, failed };

[[nodiscard]] std::string_view to_string(RunStatus s) noexcept;
[[nodiscard]] RunStatus run_status_from_string(std::string_view s);

struct LlmRunResult {
  std::string run_id;
  LlmRunConfig config;
  std::string raw_response;
  std::vector<core::AnnotationCell> cells;
  std::vector<std::string> warnings;
  RunStatus status = RunStatus::running;
  std::optional<std::string> error_code;
  int attempts = 0;
  Timestamp created_at{};

  friend bool operator==(const LlmRunResult&, const LlmRunResult&) = default;
};

/// "llm:<providerId>:<model>"
[[nodiscard]] std::string llm_annotator_id(const LlmRunConfig& config);

/// Throws Error(invalidConfig) naming the offending field.
void validate_config(const LlmRunConfig& config, const core::Codebook& codebook, const core::Transcript& transcript);

}  // namespace educoder::llm
