#pragma once

#include <string>

#include "educoder/core/model.hpp"
#include "educoder/llm/provider.hpp"
#include "educoder/llm/types.hpp"

namespace educoder::llm {

/// Builds the prompt, calls the provider up to maxRetries + 1 times (retrying
/// transport failures and replies without a JSON array, never credential
/// failures) and classifies the outcome:
///   complete - every (line, feature) in scope got a cell
///   partial  - some pairs missing; each is named in warnings
///   failed   - retries exhausted or credentials rejected; error_code set
/// Cells carry annotator "llm:<providerId>:<model>". Throws Error(invalidConfig)
/// when the config does not fit the project.
[[nodiscard]] LlmRunResult run_annotation(const LlmRunConfig& config, const core::Project& project,
                                          const Provider& provider, std::string run_id = {});

[[nodiscard]] std::string new_run_id();

}  // namespace educoder::llm
