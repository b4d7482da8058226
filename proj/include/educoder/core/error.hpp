#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace educoder {

// Machine-readable error codes. Every failure surfaced to a caller carries
// one of these plus, when applicable, the offending field and source row.
namespace errc {
inline constexpr std::string_view validation = "validation";
inline constexpr std::string_view unknown_code = "unknownCode";
inline constexpr std::string_view line_out_of_range = "lineOutOfRange";
inline constexpr std::string_view value_type_mismatch = "valueTypeMismatch";

inline constexpr std::string_view missing_speaker_column = "missingSpeakerColumn";
inline constexpr std::string_view missing_text_column = "missingTextColumn";
inline constexpr std::string_view unknown_column = "unknownColumn";
inline constexpr std::string_view malformed_file = "malformedFile";
inline constexpr std::string_view empty_transcript = "emptyTranscript";
inline constexpr std::string_view empty_speaker = "emptySpeaker";
inline constexpr std::string_view missing_code_column = "missingCodeColumn";
inline constexpr std::string_view missing_definition_column = "missingDefinitionColumn";
inline constexpr std::string_view duplicate_code_name = "duplicateCodeName";
inline constexpr std::string_view empty_codebook = "emptyCodebook";
inline constexpr std::string_view invalid_value_kind = "invalidValueKind";
inline constexpr std::string_view line_range_out_of_bounds = "lineRangeOutOfBounds";
inline constexpr std::string_view schema_version_unsupported = "schemaVersionUnsupported";
inline constexpr std::string_view integrity_failure = "integrityFailure";

inline constexpr std::string_view no_overlap = "noOverlap";
inline constexpr std::string_view no_pairable_units = "noPairableUnits";

inline constexpr std::string_view empty_line_range_selection = "emptyLineRangeSelection";
inline constexpr std::string_view no_json_array_found = "noJsonArrayFound";
inline constexpr std::string_view provider_unreachable = "providerUnreachable";
inline constexpr std::string_view authentication_failed = "authenticationFailed";
inline constexpr std::string_view response_unparseable = "responseUnparseable";
inline constexpr std::string_view run_already_active = "runAlreadyActive";
inline constexpr std::string_view invalid_config = "invalidConfig";

inline constexpr std::string_view unknown_project = "unknownProject";
inline constexpr std::string_view annotator_not_member = "annotatorNotMember";
inline constexpr std::string_view llm_cells_immutable = "llmCellsImmutable";
inline constexpr std::string_view storage_failure = "storageFailure";

inline constexpr std::string_view unauthenticated = "unauthenticated";
inline constexpr std::string_view forbidden = "forbidden";
inline constexpr std::string_view not_found = "notFound";
}  // namespace errc

/// Domain failure with a stable code. `field` names the offending input
/// (column, parameter, JSON key); `row` is a 1-based source row when the
/// failure comes from a tabular file.
class Error : public std::runtime_error {
 public:
  Error(std::string_view code, std::string message, std::string field = {},
        std::optional<std::size_t> row = std::nullopt)
      : std::runtime_error(std::move(message)),
        code_(code),
        field_(std::move(field)),
        row_(row) {}

  [[nodiscard]] const std::string& code() const noexcept { return code_; }
  [[nodiscard]] const std::string& field() const noexcept { return field_; }
  [[nodiscard]] std::optional<std::size_t> row() const noexcept { return row_; }

  /// Further codes reported alongside code(), e.g. both missing columns.
  [[nodiscard]] const std::vector<std::string>& details() const noexcept { return details_; }
  Error& with_details(std::vector<std::string> details) {
    details_ = std::move(details);
    return *this;
  }

 private:
  std::string code_;
  std::string field_;
  std::optional<std::size_t> row_;
  std::vector<std::string> details_;
};

}  // namespace educoder
