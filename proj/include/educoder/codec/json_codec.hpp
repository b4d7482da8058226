#pragma once
// JSON encodings of domain values. Shared by the bundle format, the store's
// on-disk rows and the HTTP API so all three agree byte for byte.

#include "json.hpp"

#include "educoder/core/model.hpp"
#include "educoder/irr/report.hpp"
#include "educoder/llm/types.hpp"

namespace educoder::codec {

using Json = nlohmann::ordered_json;

inline constexpr int kBundleSchemaVersion = 1;
inline constexpr std::string_view kUndefined = "undefined";

[[nodiscard]] Json encode(const core::CellValue& v);
[[nodiscard]] core::CellValue decode_cell_value(const Json& j);

[[nodiscard]] Json encode(const core::ProjectSettings& s);
[[nodiscard]] core::ProjectSettings decode_settings(const Json& j);

[[nodiscard]] Json encode(const core::Annotator& a);
[[nodiscard]] core::Annotator decode_annotator(const Json& j);

[[nodiscard]] Json encode(const core::ColumnMapping& m);
[[nodiscard]] core::ColumnMapping decode_mapping(const Json& j);

[[nodiscard]] Json encode(const core::CodeDefinition& c);
[[nodiscard]] core::CodeDefinition decode_code(const Json& j);
[[nodiscard]] Json encode(const core::Codebook& c);  // array of codes
[[nodiscard]] core::Codebook decode_codebook(const Json& j);

[[nodiscard]] Json encode(const core::Utterance& u);
[[nodiscard]] core::Utterance decode_utterance(const Json& j);
[[nodiscard]] Json encode(const core::Transcript& t);
[[nodiscard]] core::Transcript decode_transcript(const Json& j);

/// Attachment metadata; bytes are base64 under "bytesBase64" when requested.
[[nodiscard]] Json encode(const core::Attachment& a, bool with_bytes);
[[nodiscard]] core::Attachment decode_attachment(const Json& j);

[[nodiscard]] Json encode(const core::AnnotationCell& c, bool with_revision = false);
[[nodiscard]] core::AnnotationCell decode_cell(const Json& j);
[[nodiscard]] Json encode(const core::NoteEntry& n);
[[nodiscard]] core::NoteEntry decode_note(const Json& j);
[[nodiscard]] Json encode(const core::Flag& f);
[[nodiscard]] core::Flag decode_flag(const Json& j);

[[nodiscard]] Json encode(const llm::LlmRunConfig& c);
[[nodiscard]] llm::LlmRunConfig decode_run_config(const Json& j);
/// Run metadata; cells are included only when `with_cells`.
[[nodiscard]] Json encode(const llm::LlmRunResult& r, bool with_cells);
[[nodiscard]] llm::LlmRunResult decode_run(const Json& j);

/// Optional metric -> number or the literal "undefined".
[[nodiscard]] Json encode_metric(const std::optional<double>& v);
[[nodiscard]] Json encode(const irr::AgreementReport& r);

/// Everything an exported project carries.
struct BundleContents {
  int schema_version = kBundleSchemaVersion;
  core::Project project;
  std::vector<core::AnnotationCell> cells;
  std::vector<core::NoteEntry> notes;
  std::vector<core::Flag> flags;
  std::vector<llm::LlmRunResult> runs;  // metadata only; cells live in `cells`
};

/// Canonical ordering of every collection, schemaVersion first.
[[nodiscard]] Json encode(const BundleContents& b);
/// Structural decode; throws Error(schemaVersionUnsupported) or
/// Error(validation) on shape problems. Integrity is checked by the importer.
[[nodiscard]] BundleContents decode_bundle(const Json& j);

/// Sorts every collection into the canonical export order.
void canonicalize(BundleContents& b);

}  // namespace educoder::codec
