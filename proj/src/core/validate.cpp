#include "educoder/core/validate.hpp"

namespace educoder::core {

std::optional<Error> validate_line(LineNumber line, const Transcript& transcript) {
  if (line < 1 || line > transcript.line_count()) {
    return Error(errc::line_out_of_range,
                 "line " + std::to_string(line) + " outside 1.." + std::to_string(transcript.line_count()),
                 "lineNumber");
  }
  return std::nullopt;
}

std::optional<Error> validate_cell(const AnnotationCell& cell, const Codebook& codebook,
                                   const Transcript& transcript) {
  const CodeDefinition* code = codebook.find(cell.code_id);
  if (code == nullptr) return Error(errc::unknown_code, "unknown code: " + cell.code_id, "codeId");
  if (auto err = validate_line(cell.line, transcript)) return err;
  const bool is_text = std::holds_alternative<std::string>(cell.value);
  if (code->value_kind == ValueKind::binary && is_text) {
    return Error(errc::value_type_mismatch, "code " + cell.code_id + " is binary; expected true/false/unset",
                 "value");
  }
  if (code->value_kind == ValueKind::free_text && !is_text) {
    return Error(errc::value_type_mismatch, "code " + cell.code_id + " is free text; expected a string", "value");
  }
  return std::nullopt;
}

}  // namespace educoder::core
