#pragma once

#include <optional>

#include "educoder/core/error.hpp"
#include "educoder/core/model.hpp"

namespace educoder::core {

/// nullopt when the cell is acceptable; otherwise an Error whose code is one
/// of unknownCode, lineOutOfRange, valueTypeMismatch.
[[nodiscard]] std::optional<Error> validate_cell(const AnnotationCell& cell, const Codebook& codebook,
                                                 const Transcript& transcript);

[[nodiscard]] std::optional<Error> validate_line(LineNumber line, const Transcript& transcript);

}  // namespace educoder::core
