#pragma once
// Shared domain types. Everything here is a plain value: copyable, no
// interior mutability, safe to hand between request handlers.

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "educoder/core/time.hpp"

namespace educoder::core {

using LineNumber = int;

enum class AttachmentKind { instructions, image, other };

struct Attachment {
  std::string id;
  AttachmentKind kind = AttachmentKind::other;
  std::string title;
  std::string media_type;
  std::string bytes;

  friend bool operator==(const Attachment&, const Attachment&) = default;
};

struct Utterance {
  LineNumber line = 0;
  std::string speaker;
  std::string text;
  std::optional<std::string> segment;
  std::optional<std::string> timestamp;
  /// Extra source columns in source order.
  std::vector<std::pair<std::string, std::string>> extras;

  friend bool operator==(const Utterance&, const Utterance&) = default;
};

struct Segment {
  std::string label;
  LineNumber start_line = 0;
  LineNumber end_line = 0;

  friend bool operator==(const Segment&, const Segment&) = default;
};

/// Which source columns play which role in a transcript file.
struct ColumnMapping {
  std::string speaker_column;
  std::string text_column;
  std::optional<std::string> segment_column;
  std::optional<std::string> timestamp_column;
  std::vector<std::string> extra_columns;

  friend bool operator==(const ColumnMapping&, const ColumnMapping&) = default;
};

struct Transcript {
  std::vector<Utterance> utterances;
  ColumnMapping mapping;
  std::vector<std::string> source_columns;
  std::vector<Segment> segments;

  [[nodiscard]] LineNumber line_count() const noexcept { return static_cast<LineNumber>(utterances.size()); }
  [[nodiscard]] const Utterance& at_line(LineNumber line) const { return utterances.at(static_cast<std::size_t>(line - 1)); }

  friend bool operator==(const Transcript&, const Transcript&) = default;
};

/// Maximal runs of equal segment labels. A blank cell in a segment column is
/// the label ""; lines with no segment column at all form no segment.
[[nodiscard]] std::vector<Segment> derive_segments(const std::vector<Utterance>& utterances);

enum class ValueKind { binary, free_text };

struct CodeDefinition {
  std::string code_id;
  std::string name;
  std::string definition;
  std::optional<std::string> category;
  std::vector<std::string> examples;
  std::vector<std::string> non_examples;
  ValueKind value_kind = ValueKind::binary;

  friend bool operator==(const CodeDefinition&, const CodeDefinition&) = default;
};

struct Codebook {
  std::vector<CodeDefinition> codes;

  [[nodiscard]] const CodeDefinition* find(std::string_view code_id) const noexcept;
  /// Distinct category labels in order of first appearance.
  [[nodiscard]] std::vector<std::string> categories() const;

  friend bool operator==(const Codebook&, const Codebook&) = default;
};

enum class RaterKind { human, llm };

inline constexpr std::string_view kLlmPrefix = "llm:";

[[nodiscard]] inline RaterKind rater_kind_of(std::string_view annotator_id) noexcept {
  return annotator_id.starts_with(kLlmPrefix) ? RaterKind::llm : RaterKind::human;
}

struct Annotator {
  std::string id;
  RaterKind kind = RaterKind::human;
  std::string display_name;

  friend bool operator==(const Annotator&, const Annotator&) = default;
};

/// monostate = unset (binary only), bool = presence, string = free text.
using CellValue = std::variant<std::monostate, bool, std::string>;

struct CellKey {
  std::string annotator;
  LineNumber line = 0;
  std::string code_id;

  friend auto operator<=>(const CellKey&, const CellKey&) = default;
  friend bool operator==(const CellKey&, const CellKey&) = default;
};

struct AnnotationCell {
  std::string annotator;
  LineNumber line = 0;
  std::string code_id;
  CellValue value;
  std::optional<std::string> rationale;
  Timestamp updated_at{};
  std::int64_t revision = 0;

  [[nodiscard]] CellKey key() const { return {annotator, line, code_id}; }

  friend bool operator==(const AnnotationCell&, const AnnotationCell&) = default;
};

struct NoteEntry {
  std::string annotator;
  LineNumber line = 0;
  std::string text;
  Timestamp updated_at{};

  friend bool operator==(const NoteEntry&, const NoteEntry&) = default;
};

struct Flag {
  std::string annotator;
  LineNumber line = 0;
  std::optional<std::string> reason;
  bool active = true;
  Timestamp updated_at{};

  friend bool operator==(const Flag&, const Flag&) = default;
};

enum class PoolingMode { per_code_mean, pooled_cells, both };

struct ProjectSettings {
  double low_agreement_threshold = 0.60;
  PoolingMode pooling = PoolingMode::both;

  friend bool operator==(const ProjectSettings&, const ProjectSettings&) = default;
};

/// Throws Error(validation) when the threshold leaves [-1, 1].
void validate_settings(const ProjectSettings& settings);

struct Project {
  std::string id;
  std::string name;
  std::vector<Attachment> materials;
  std::optional<Codebook> codebook;
  std::optional<Transcript> transcript;
  std::vector<Annotator> annotators;  // sorted by id
  ProjectSettings settings;

  [[nodiscard]] const Annotator* find_annotator(std::string_view id) const noexcept;

  friend bool operator==(const Project&, const Project&) = default;
};

// Enum <-> wire-name conversions. from_string throws Error(validation).
[[nodiscard]] std::string_view to_string(AttachmentKind k) noexcept;
[[nodiscard]] std::string_view to_string(ValueKind k) noexcept;
[[nodiscard]] std::string_view to_string(RaterKind k) noexcept;
[[nodiscard]] std::string_view to_string(PoolingMode m) noexcept;
[[nodiscard]] AttachmentKind attachment_kind_from_string(std::string_view s);
[[nodiscard]] ValueKind value_kind_from_string(std::string_view s);
[[nodiscard]] RaterKind rater_kind_from_string(std::string_view s);
[[nodiscard]] PoolingMode pooling_mode_from_string(std::string_view s);

}  // namespace educoder::core
