#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "educoder/core/model.hpp"
#include "educoder/ingest/table.hpp"

namespace educoder::ingest {

using core::ColumnMapping;

// Header synonyms, matched case-insensitively after trimming.
inline const std::vector<std::string> kSpeakerSynonyms = {"speaker", "speaker_name", "role"};
inline const std::vector<std::string> kTextSynonyms = {"text", "utterance", "dialogue", "content"};
inline const std::vector<std::string> kSegmentSynonyms = {"segment", "section", "activity"};
inline const std::vector<std::string> kTimestampSynonyms = {"timestamp", "time", "start_time"};

/// Infers the column roles from a header row. Throws Error with code
/// missingSpeakerColumn or missingTextColumn; when both are missing the
/// first is the code and details() lists both.
[[nodiscard]] ColumnMapping detect_columns(const std::vector<std::string>& headers);

/// Parses a transcript file. Without an explicit mapping the header row is run
/// through detect_columns. Fully blank rows are skipped; a row with an empty
/// speaker is rejected with its source row.
[[nodiscard]] core::Transcript parse_transcript(std::string_view bytes, FileFormat format,
                                                const std::optional<ColumnMapping>& mapping = std::nullopt);

[[nodiscard]] core::Transcript transcript_from_table(const Table& table,
                                                     const std::optional<ColumnMapping>& mapping = std::nullopt);

/// Writes the transcript back out as CSV using its source columns.
[[nodiscard]] std::string write_transcript_csv(const core::Transcript& transcript);

}  // namespace educoder::ingest
