#pragma once

#include <string_view>

#include "educoder/core/model.hpp"
#include "educoder/ingest/table.hpp"

namespace educoder::ingest {

/// Requires "code" and "definition" headers. Optional: "category",
/// "example"/"examples", "non_example"/"non_examples" (one entry per line of
/// the cell), "value_kind" (binary | free_text, default binary).
[[nodiscard]] core::Codebook parse_codebook(std::string_view bytes, FileFormat format);
[[nodiscard]] core::Codebook codebook_from_table(const Table& table);

[[nodiscard]] std::string write_codebook_csv(const core::Codebook& codebook);

}  // namespace educoder::ingest
