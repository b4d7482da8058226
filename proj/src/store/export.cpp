#include "educoder/store/export.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <tuple>

#include "educoder/ingest/table.hpp"

namespace educoder::store {

namespace {

std::string value_text(const core::CellValue& v) {
  if (const auto* b = std::get_if<bool>(&v)) return *b ? "true" : "false";
  if (const auto* s = std::get_if<std::string>(&v)) return *s;
  return {};
}

}  // namespace

codec::BundleContents to_bundle(const Snapshot& snapshot) {
  codec::BundleContents b;
  b.project = *snapshot.project;
  b.cells = snapshot.cells;
  b.notes = snapshot.notes;
  b.flags = snapshot.flags;
  b.runs = snapshot.runs;
  codec::canonicalize(b);
  return b;
}

std::string export_bundle_json(const Snapshot& snapshot) {
  return codec::encode(to_bundle(snapshot)).dump(2);
}

std::string export_annotations_csv(const Snapshot& snapshot) {
  using LineKey = std::pair<std::string, core::LineNumber>;
  std::map<LineKey, const core::NoteEntry*> notes;
  std::map<LineKey, const core::Flag*> flags;
  for (const auto& n : snapshot.notes) notes[{n.annotator, n.line}] = &n;
  for (const auto& f : snapshot.flags) {
    if (f.active) flags[{f.annotator, f.line}] = &f;
  }

  struct Row {
    core::LineNumber line;
    std::string code;
    std::string annotator;
    std::vector<std::string> fields;
  };
  std::vector<Row> rows;
  std::set<LineKey> covered;
  const auto* transcript = snapshot.project->transcript ? &*snapshot.project->transcript : nullptr;

  auto make_row = [&](const std::string& annotator, core::LineNumber line, const std::string& code,
                      const std::string& value, const std::string& rationale, Timestamp updated) {
    std::string speaker, text, segment;
    if (transcript != nullptr && line >= 1 && line <= transcript->line_count()) {
      const auto& u = transcript->at_line(line);
      speaker = u.speaker;
      text = u.text;
      segment = u.segment.value_or("");
    }
    std::string note, flag;
    if (auto it = notes.find({annotator, line}); it != notes.end()) {
      note = it->second->text;
      updated = std::max(updated, it->second->updated_at);
    }
    if (auto it = flags.find({annotator, line}); it != flags.end()) {
      flag = "true";
      updated = std::max(updated, it->second->updated_at);
    }
    rows.push_back({line, code, annotator,
                    {std::to_string(line), speaker, text, segment, annotator, code, value, rationale, note, flag,
                     to_iso8601(updated)}});
  };

  for (const auto& c : snapshot.cells) {
    covered.insert({c.annotator, c.line});
    make_row(c.annotator, c.line, c.code_id, value_text(c.value), c.rationale.value_or(""), c.updated_at);
  }
  std::set<LineKey> loose;
  for (const auto& [key, n] : notes) {
    if (!covered.contains(key)) loose.insert(key);
  }
  for (const auto& [key, f] : flags) {
    if (!covered.contains(key)) loose.insert(key);
  }
  for (const auto& [annotator, line] : loose) make_row(annotator, line, "", "", "", Timestamp{});

  std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
    return std::tie(a.line, a.code, a.annotator) < std::tie(b.line, b.code, b.annotator);
  });

  std::string out;
  ingest::append_csv_record(out, {"line", "speaker", "text", "segment", "annotator", "code", "value", "rationale",
                                  "note", "flag", "updated_at"});
  for (const auto& r : rows) ingest::append_csv_record(out, r.fields);
  return out;
}

Snapshot snapshot_from_bundle(codec::BundleContents contents) {
  codec::canonicalize(contents);
  Snapshot s;
  s.project_id = contents.project.id;
  s.codebook_version = contents.project.codebook ? 1 : 0;
  s.transcript_version = contents.project.transcript ? 1 : 0;
  s.cells = std::move(contents.cells);
  std::sort(s.cells.begin(), s.cells.end(), [](const auto& a, const auto& b) { return a.key() < b.key(); });
  s.notes = std::move(contents.notes);
  s.flags = std::move(contents.flags);
  std::erase_if(s.flags, [](const core::Flag& f) { return !f.active; });
  s.runs = std::move(contents.runs);
  s.project = std::make_shared<const core::Project>(std::move(contents.project));
  return s;
}

}  // namespace educoder::store
