#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "educoder/core/model.hpp"
#include "educoder/llm/types.hpp"

namespace educoder::llm {

/// Used when a run config leaves promptTemplate empty.
inline constexpr std::string_view kDefaultPromptTemplate =
    "You are assisting researchers who annotate educational dialogue transcripts one utterance at a time.\n"
    "\n"
    "Context materials:\n"
    "{{instructions}}\n"
    "\n"
    "Codebook:\n"
    "{{codebook}}\n"
    "\n"
    "Transcript:\n"
    "{{transcript}}\n"
    "\n"
    "For every transcript line above, decide whether each of these codes is present: {{features}}.\n";

struct BuiltPrompt {
  std::string text;
  std::vector<std::string> warnings;
};

/// Expands {{codebook}}, {{transcript}}, {{features}} and {{instructions}} and
/// appends the JSON output contract. Unknown placeholders stay verbatim and
/// produce a warning. Throws Error(emptyLineRangeSelection) when the range
/// selects no transcript line.
[[nodiscard]] BuiltPrompt build_prompt(const LlmRunConfig& config, const core::Codebook& codebook,
                                       const core::Transcript& transcript, std::span<const core::Attachment> materials);

/// The fixed trailer telling the model how to answer.
[[nodiscard]] std::string output_contract(const LlmRunConfig& config);

}  // namespace educoder::llm
