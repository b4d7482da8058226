#include "educoder/ingest/bundle.hpp"

#include <set>
#include <tuple>

#include "educoder/core/error.hpp"
#include "educoder/core/validate.hpp"

namespace educoder::ingest {

namespace {

[[noreturn]] void integrity(const std::string& message, const std::string& field) {
  throw Error(errc::integrity_failure, message, field);
}

}  // namespace

codec::BundleContents import_annotated_bundle(std::string_view bytes) {
  codec::Json j = codec::Json::parse(bytes.begin(), bytes.end(), nullptr, false);
  if (j.is_discarded()) throw Error(errc::integrity_failure, "bundle is not valid JSON");
  codec::BundleContents b;
  try {
    b = codec::decode_bundle(j);
  } catch (const Error& e) {
    if (e.code() == errc::schema_version_unsupported) throw;
    throw Error(errc::integrity_failure, std::string("malformed bundle: ") + e.what(), e.field());
  }

  const auto& p = b.project;
  std::set<std::string> members;
  for (const auto& a : p.annotators) {
    if (!members.insert(a.id).second) integrity("duplicate annotator " + a.id, "annotators");
  }
  if (p.codebook) {
    std::set<std::string> ids;
    for (const auto& c : p.codebook->codes) {
      if (!ids.insert(c.code_id).second) integrity("duplicate code id " + c.code_id, "codebook");
    }
  }

  if (!b.cells.empty() && (!p.codebook || !p.transcript)) {
    integrity("annotations present without both codebook and transcript", "annotations");
  }
  std::set<core::CellKey> keys;
  for (const auto& c : b.cells) {
    if (auto err = core::validate_cell(c, *p.codebook, *p.transcript)) {
      integrity("annotation (" + c.annotator + ", line " + std::to_string(c.line) + ", " + c.code_id +
                    "): " + err->what(),
                err->field());
    }
    if (!members.contains(c.annotator)) integrity("annotation by non-member " + c.annotator, "annotator");
    if (!keys.insert(c.key()).second) integrity("duplicate annotation for one (annotator, line, code)", "annotations");
  }

  const core::LineNumber lines = p.transcript ? p.transcript->line_count() : 0;
  std::set<std::pair<std::string, core::LineNumber>> seen;
  for (const auto& n : b.notes) {
    if (n.line < 1 || n.line > lines) integrity("note on unknown line " + std::to_string(n.line), "notes");
    if (!members.contains(n.annotator)) integrity("note by non-member " + n.annotator, "notes");
    if (!seen.insert({n.annotator, n.line}).second) integrity("duplicate note", "notes");
  }
  seen.clear();
  for (const auto& f : b.flags) {
    if (f.line < 1 || f.line > lines) integrity("flag on unknown line " + std::to_string(f.line), "flags");
    if (!members.contains(f.annotator)) integrity("flag by non-member " + f.annotator, "flags");
    if (!seen.insert({f.annotator, f.line}).second) integrity("duplicate flag", "flags");
  }
  for (auto& c : b.cells) c.revision = 1;
  return b;
}

}  // namespace educoder::ingest
