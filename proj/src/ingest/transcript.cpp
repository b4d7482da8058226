#include "educoder/ingest/transcript.hpp"

#include <algorithm>
#include <set>

#include "educoder/core/error.hpp"
#include "educoder/core/slug.hpp"

namespace educoder::ingest {

namespace {

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& s : items) {
    if (!out.empty()) out += ", ";
    out += "\"" + s + "\"";
  }
  return out;
}

std::optional<std::string> first_match(const std::vector<std::string>& headers, const std::vector<std::string>& synonyms,
                                       const std::set<std::string>& taken) {
  for (const auto& h : headers) {
    if (taken.contains(h)) continue;
    const std::string key = core::to_lower_ascii(core::trim(h));
    if (std::find(synonyms.begin(), synonyms.end(), key) != synonyms.end()) return h;
  }
  return std::nullopt;
}

std::optional<std::size_t> index_of(const std::vector<std::string>& headers, const std::string& name) {
  auto it = std::find(headers.begin(), headers.end(), name);
  if (it == headers.end()) return std::nullopt;
  return static_cast<std::size_t>(it - headers.begin());
}

}  // namespace

ColumnMapping detect_columns(const std::vector<std::string>& headers) {
  if (headers.empty()) throw Error(errc::malformed_file, "header row is empty", {}, 1);
  std::set<std::string> taken;
  auto speaker = first_match(headers, kSpeakerSynonyms, taken);
  auto text = first_match(headers, kTextSynonyms, taken);
  if (!speaker || !text) {
    std::vector<std::string> missing;
    std::string message;
    if (!speaker) {
      missing.emplace_back(errc::missing_speaker_column);
      message += "no speaker column (expected one of " + join(kSpeakerSynonyms) + ")";
    }
    if (!text) {
      missing.emplace_back(errc::missing_text_column);
      if (!message.empty()) message += "; ";
      message += "no text column (expected one of " + join(kTextSynonyms) + ")";
    }
    Error err(missing.front(), message, !speaker ? "speaker" : "text", 1);
    err.with_details(missing);
    throw err;
  }
  ColumnMapping m;
  m.speaker_column = *speaker;
  m.text_column = *text;
  taken = {*speaker, *text};
  m.segment_column = first_match(headers, kSegmentSynonyms, taken);
  if (m.segment_column) taken.insert(*m.segment_column);
  m.timestamp_column = first_match(headers, kTimestampSynonyms, taken);
  if (m.timestamp_column) taken.insert(*m.timestamp_column);
  for (const auto& h : headers) {
    if (!taken.contains(h)) m.extra_columns.push_back(h);
  }
  return m;
}

core::Transcript transcript_from_table(const Table& table, const std::optional<ColumnMapping>& mapping) {
  ColumnMapping m = mapping ? *mapping : detect_columns(table.header);
  if (mapping) {
    if (m.speaker_column == m.text_column) {
      throw Error(errc::validation, "speaker and text columns must differ", "textColumn");
    }
    std::vector<std::string> named = {m.speaker_column, m.text_column};
    if (m.segment_column) named.push_back(*m.segment_column);
    if (m.timestamp_column) named.push_back(*m.timestamp_column);
    named.insert(named.end(), m.extra_columns.begin(), m.extra_columns.end());
    for (const auto& name : named) {
      if (!index_of(table.header, name)) {
        throw Error(errc::unknown_column, "column \"" + name + "\" not in header", name, 1);
      }
    }
  }

  const std::size_t speaker_idx = *index_of(table.header, m.speaker_column);
  const std::size_t text_idx = *index_of(table.header, m.text_column);
  const auto segment_idx = m.segment_column ? index_of(table.header, *m.segment_column) : std::nullopt;
  const auto timestamp_idx = m.timestamp_column ? index_of(table.header, *m.timestamp_column) : std::nullopt;
  std::vector<std::size_t> extra_idx;
  for (const auto& e : m.extra_columns) extra_idx.push_back(*index_of(table.header, e));

  core::Transcript t;
  t.source_columns = table.header;
  t.mapping = m;
  for (const auto& row : table.rows) {
    std::vector<std::string> cells;
    cells.reserve(row.cells.size());
    for (const auto& c : row.cells) cells.push_back(core::trim(c));
    if (std::all_of(cells.begin(), cells.end(), [](const std::string& c) { return c.empty(); })) continue;
    core::Utterance u;
    u.line = t.line_count() + 1;
    u.speaker = cells[speaker_idx];
    if (u.speaker.empty()) throw Error(errc::empty_speaker, "row has an empty speaker", m.speaker_column, row.source_row);
    u.text = cells[text_idx];
    if (segment_idx) u.segment = cells[*segment_idx];
    if (timestamp_idx && !cells[*timestamp_idx].empty()) u.timestamp = cells[*timestamp_idx];
    for (std::size_t i = 0; i < extra_idx.size(); ++i) u.extras.emplace_back(m.extra_columns[i], cells[extra_idx[i]]);
    t.utterances.push_back(std::move(u));
  }
  if (t.utterances.empty()) throw Error(errc::empty_transcript, "transcript has no utterances", {}, 1);
  t.segments = core::derive_segments(t.utterances);
  return t;
}

core::Transcript parse_transcript(std::string_view bytes, FileFormat format, const std::optional<ColumnMapping>& mapping) {
  return transcript_from_table(read_table(bytes, format), mapping);
}

std::string write_transcript_csv(const core::Transcript& transcript) {
  const auto& m = transcript.mapping;
  std::string out;
  append_csv_record(out, transcript.source_columns);
  for (const auto& u : transcript.utterances) {
    std::vector<std::string> row;
    row.reserve(transcript.source_columns.size());
    for (const auto& col : transcript.source_columns) {
      if (col == m.speaker_column) {
        row.push_back(u.speaker);
      } else if (col == m.text_column) {
        row.push_back(u.text);
      } else if (m.segment_column && col == *m.segment_column) {
        row.push_back(u.segment.value_or(""));
      } else if (m.timestamp_column && col == *m.timestamp_column) {
        row.push_back(u.timestamp.value_or(""));
      } else {
        auto it = std::find_if(u.extras.begin(), u.extras.end(), [&](const auto& kv) { return kv.first == col; });
        row.push_back(it == u.extras.end() ? "" : it->second);
      }
    }
    append_csv_record(out, row);
  }
  return out;
}

}  // namespace educoder::ingest
