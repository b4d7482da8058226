#include "educoder/llm/runner.hpp"

#include <set>

#include "educoder/core/error.hpp"
#include "educoder/core/ids.hpp"
#include "educoder/llm/prompt.hpp"
#include "educoder/llm/response.hpp"

namespace educoder::llm {

std::string new_run_id() { return "run-" + core::random_hex(8); }

LlmRunResult run_annotation(const LlmRunConfig& config, const core::Project& project, const Provider& provider,
                            std::string run_id) {
  if (!project.codebook || !project.transcript) {
    throw Error(errc::invalid_config, "project needs a codebook and a transcript before an LLM run", "project");
  }
  validate_config(config, *project.codebook, *project.transcript);

  LlmRunResult result;
  result.run_id = run_id.empty() ? new_run_id() : std::move(run_id);
  result.config = config;
  result.created_at = now_utc();

  const BuiltPrompt prompt = build_prompt(config, *project.codebook, *project.transcript, project.materials);
  result.warnings = prompt.warnings;

  std::optional<ParsedResponse> parsed;
  std::string failure;
  for (int attempt = 1; attempt <= config.max_retries + 1; ++attempt) {
    result.attempts = attempt;
    try {
      result.raw_response = provider(ProviderRequest{prompt.text, config, attempt});
    } catch (const ProviderError& e) {
      if (e.kind() == ProviderError::Kind::authentication) {
        failure = std::string(errc::authentication_failed);
        result.warnings.push_back(std::string("attempt ") + std::to_string(attempt) + ": " + e.what());
        break;
      }
      failure = std::string(errc::provider_unreachable);
      result.warnings.push_back(std::string("attempt ") + std::to_string(attempt) + ": " + e.what());
      continue;
    }
    try {
      parsed = parse_llm_response(result.raw_response, config);
      break;
    } catch (const Error& e) {
      failure = std::string(errc::response_unparseable);
      result.warnings.push_back(std::string("attempt ") + std::to_string(attempt) + ": " + e.what());
    }
  }

  if (!parsed) {
    result.status = RunStatus::failed;
    result.error_code = failure;
    return result;
  }

  const Timestamp stamp = now_utc();
  result.warnings.insert(result.warnings.end(), parsed->warnings.begin(), parsed->warnings.end());
  std::set<std::pair<core::LineNumber, std::string>> covered;
  for (auto& cell : parsed->cells) {
    cell.updated_at = stamp;
    covered.insert({cell.line, cell.code_id});
  }
  result.cells = std::move(parsed->cells);

  bool complete = true;
  for (core::LineNumber line = config.line_range.start; line <= config.line_range.end; ++line) {
    for (const auto& code : config.features) {
      if (!covered.contains({line, code})) {
        complete = false;
        result.warnings.push_back("missing: line " + std::to_string(line) + ", code \"" + code + "\"");
      }
    }
  }
  result.status = complete ? RunStatus::complete : RunStatus::partial;
  return result;
}

}  // namespace educoder::llm
