#include "educoder/store/store.hpp"

#include <algorithm>
#include <tuple>

#include "educoder/core/error.hpp"
#include "educoder/core/ids.hpp"
#include "educoder/core/validate.hpp"
#include "educoder/store/sqlite.hpp"

namespace educoder::store {

namespace {

constexpr std::string_view kSchema = R"sql(
CREATE TABLE IF NOT EXISTS meta(key TEXT PRIMARY KEY, value TEXT NOT NULL);
CREATE TABLE IF NOT EXISTS projects(
  id TEXT PRIMARY KEY, name TEXT NOT NULL, settings TEXT NOT NULL,
  codebook TEXT, codebook_version INTEGER NOT NULL,
  transcript TEXT, transcript_version INTEGER NOT NULL,
  annotators TEXT NOT NULL, seq INTEGER NOT NULL);
CREATE TABLE IF NOT EXISTS materials(
  project_id TEXT NOT NULL, id TEXT NOT NULL, kind TEXT NOT NULL, title TEXT NOT NULL,
  media_type TEXT NOT NULL, bytes BLOB NOT NULL, PRIMARY KEY(project_id, id));
CREATE TABLE IF NOT EXISTS cells(
  project_id TEXT NOT NULL, annotator TEXT NOT NULL, line INTEGER NOT NULL, code_id TEXT NOT NULL,
  value TEXT NOT NULL, rationale TEXT, updated_at INTEGER NOT NULL, revision INTEGER NOT NULL,
  PRIMARY KEY(project_id, annotator, line, code_id));
CREATE TABLE IF NOT EXISTS cell_revisions(
  project_id TEXT NOT NULL, annotator TEXT NOT NULL, line INTEGER NOT NULL, code_id TEXT NOT NULL,
  revision INTEGER NOT NULL, value TEXT NOT NULL, updated_at INTEGER NOT NULL,
  PRIMARY KEY(project_id, annotator, line, code_id, revision));
CREATE TABLE IF NOT EXISTS notes(
  project_id TEXT NOT NULL, annotator TEXT NOT NULL, line INTEGER NOT NULL, text TEXT NOT NULL,
  updated_at INTEGER NOT NULL, PRIMARY KEY(project_id, annotator, line));
CREATE TABLE IF NOT EXISTS flags(
  project_id TEXT NOT NULL, annotator TEXT NOT NULL, line INTEGER NOT NULL, reason TEXT,
  updated_at INTEGER NOT NULL, PRIMARY KEY(project_id, annotator, line));
CREATE TABLE IF NOT EXISTS llm_runs(
  project_id TEXT NOT NULL, run_id TEXT NOT NULL, body TEXT NOT NULL, PRIMARY KEY(project_id, run_id));
CREATE TABLE IF NOT EXISTS tokens(token TEXT PRIMARY KEY, annotator TEXT NOT NULL, role TEXT NOT NULL);
)sql";

std::int64_t millis(Timestamp t) { return t.time_since_epoch().count(); }
Timestamp from_millis(std::int64_t ms) { return Timestamp{std::chrono::milliseconds{ms}}; }

[[noreturn]] void unknown_project(const std::string& id) {
  throw Error(errc::unknown_project, "unknown project " + id, "projectId");
}

codec::Json annotators_json(const std::vector<core::Annotator>& annotators) {
  codec::Json j = codec::Json::array();
  for (const auto& a : annotators) j.push_back(codec::encode(a));
  return j;
}

void require_member(const core::Project& p, const std::string& annotator) {
  if (p.find_annotator(annotator) == nullptr) {
    throw Error(errc::annotator_not_member, annotator + " is not a member of project " + p.id, "annotator");
  }
}

std::string role_name(Role r) { return r == Role::administrator ? "administrator" : "annotator"; }

}  // namespace

Store::Store(const std::filesystem::path& path) : db_(std::make_unique<Database>(path)) {
  if (!path.empty()) {
    db_->exec("PRAGMA journal_mode=WAL");
    db_->exec("PRAGMA synchronous=FULL");
  }
  db_->exec(kSchema);
  load();
}

Store::~Store() = default;

Store::ProjectState& Store::state_for(const std::string& project_id) {
  auto it = projects_.find(project_id);
  if (it == projects_.end()) unknown_project(project_id);
  return it->second;
}

const Store::ProjectState& Store::state_for(const std::string& project_id) const {
  auto it = projects_.find(project_id);
  if (it == projects_.end()) unknown_project(project_id);
  return it->second;
}

void Store::load() {
  auto ps = db_->prepare(
      "SELECT id, name, settings, codebook, codebook_version, transcript, transcript_version, annotators, seq "
      "FROM projects");
  while (ps.step()) {
    core::Project p;
    p.id = ps.text(0);
    p.name = ps.text(1);
    p.settings = codec::decode_settings(codec::Json::parse(ps.text(2)));
    if (auto cb = ps.optional_text(3)) p.codebook = codec::decode_codebook(codec::Json::parse(*cb));
    if (auto tr = ps.optional_text(5)) p.transcript = codec::decode_transcript(codec::Json::parse(*tr));
    for (const auto& a : codec::Json::parse(ps.text(7))) p.annotators.push_back(codec::decode_annotator(a));
    ProjectState st;
    st.codebook_version = ps.integer(4);
    st.transcript_version = ps.integer(6);
    st.seq = static_cast<std::uint64_t>(ps.integer(8));
    seq_ = std::max(seq_, st.seq);
    const std::string id = p.id;
    st.project = std::make_shared<const core::Project>(std::move(p));
    projects_.emplace(id, std::move(st));
  }

  std::map<std::string, std::vector<core::Attachment>> materials;
  auto ms = db_->prepare("SELECT project_id, id, kind, title, media_type, bytes FROM materials ORDER BY project_id, id");
  while (ms.step()) {
    materials[ms.text(0)].push_back(
        {ms.text(1), core::attachment_kind_from_string(ms.text(2)), ms.text(3), ms.text(4), ms.blob(5)});
  }
  for (auto& [id, list] : materials) {
    auto it = projects_.find(id);
    if (it == projects_.end()) continue;
    auto p = std::make_shared<core::Project>(*it->second.project);
    p->materials = std::move(list);
    it->second.project = std::move(p);
  }

  auto cs = db_->prepare("SELECT project_id, annotator, line, code_id, value, rationale, updated_at, revision FROM cells");
  while (cs.step()) {
    auto it = projects_.find(cs.text(0));
    if (it == projects_.end()) continue;
    core::AnnotationCell c;
    c.annotator = cs.text(1);
    c.line = static_cast<core::LineNumber>(cs.integer(2));
    c.code_id = cs.text(3);
    c.value = codec::decode_cell_value(codec::Json::parse(cs.text(4)));
    c.rationale = cs.optional_text(5);
    c.updated_at = from_millis(cs.integer(6));
    c.revision = cs.integer(7);
    auto key = c.key();
    it->second.cells.emplace(std::move(key), StoredCell{std::move(c), false});
  }

  auto ns = db_->prepare("SELECT project_id, annotator, line, text, updated_at FROM notes");
  while (ns.step()) {
    auto it = projects_.find(ns.text(0));
    if (it == projects_.end()) continue;
    core::NoteEntry n{ns.text(1), static_cast<core::LineNumber>(ns.integer(2)), ns.text(3), from_millis(ns.integer(4))};
    it->second.notes.emplace(LineKey{n.annotator, n.line}, std::pair{n, false});
  }

  auto fs = db_->prepare("SELECT project_id, annotator, line, reason, updated_at FROM flags");
  while (fs.step()) {
    auto it = projects_.find(fs.text(0));
    if (it == projects_.end()) continue;
    core::Flag f{fs.text(1), static_cast<core::LineNumber>(fs.integer(2)), fs.optional_text(3), true,
                 from_millis(fs.integer(4))};
    it->second.flags.emplace(LineKey{f.annotator, f.line}, std::pair{f, false});
  }

  auto rs = db_->prepare("SELECT project_id, body FROM llm_runs");
  while (rs.step()) {
    auto it = projects_.find(rs.text(0));
    if (it == projects_.end()) continue;
    auto run = codec::decode_run(codec::Json::parse(rs.text(1)));
    // A run that was in flight when the process stopped will never finish.
    if (run.status == llm::RunStatus::running) {
      run.status = llm::RunStatus::failed;
      run.error_code = std::string(errc::provider_unreachable);
      run.warnings.push_back("interrupted by server restart");
    }
    it->second.runs.emplace(run.run_id, std::move(run));
  }

  for (auto& [id, st] : projects_) requarantine(st);
}

void Store::requarantine(ProjectState& st) {
  const auto& p = *st.project;
  for (auto& [key, stored] : st.cells) {
    stored.quarantined = !p.codebook || !p.transcript || core::validate_cell(stored.cell, *p.codebook, *p.transcript);
  }
  const core::LineNumber n = p.transcript ? p.transcript->line_count() : 0;
  for (auto& [key, entry] : st.notes) entry.second = key.second < 1 || key.second > n;
  for (auto& [key, entry] : st.flags) entry.second = key.second < 1 || key.second > n;
}

void Store::persist_project_row(const ProjectState& st) {
  const auto& p = *st.project;
  auto s = db_->prepare(
      "INSERT OR REPLACE INTO projects(id, name, settings, codebook, codebook_version, transcript, "
      "transcript_version, annotators, seq) VALUES(?,?,?,?,?,?,?,?,?)");
  s.bind(1, p.id).bind(2, p.name).bind(3, codec::encode(p.settings).dump());
  s.bind(4, p.codebook ? std::optional<std::string>(codec::encode(*p.codebook).dump()) : std::nullopt);
  s.bind(5, st.codebook_version);
  s.bind(6, p.transcript ? std::optional<std::string>(codec::encode(*p.transcript).dump()) : std::nullopt);
  s.bind(7, st.transcript_version);
  s.bind(8, annotators_json(p.annotators).dump());
  s.bind(9, static_cast<std::int64_t>(st.seq));
  s.run();
}

void Store::touch(ProjectState& st) {
  st.seq = ++seq_;
  st.cached.reset();
}

std::string Store::insert_project(codec::BundleContents contents, bool preserve_cells) {
  std::string id;
  do {
    id = "p-" + core::random_hex(6);
  } while (projects_.contains(id));

  ProjectState st;
  core::Project p = std::move(contents.project);
  p.id = id;
  for (auto& m : p.materials) {
    if (m.id.empty()) m.id = "m-" + core::random_hex(6);
  }
  std::sort(p.annotators.begin(), p.annotators.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  st.codebook_version = p.codebook ? 1 : 0;
  st.transcript_version = p.transcript ? 1 : 0;
  st.project = std::make_shared<const core::Project>(std::move(p));

  Transaction tx(*db_);
  const std::uint64_t prev_seq = seq_;
  try {
    touch(st);
    persist_project_row(st);
    for (const auto& m : st.project->materials) {
      auto s = db_->prepare("INSERT INTO materials(project_id, id, kind, title, media_type, bytes) VALUES(?,?,?,?,?,?)");
      s.bind(1, id).bind(2, m.id).bind(3, core::to_string(m.kind)).bind(4, m.title).bind(5, m.media_type);
      s.bind_blob(6, m.bytes).run();
    }
    if (preserve_cells) {
      for (auto& c : contents.cells) {
        c.revision = 1;
        auto s = db_->prepare(
            "INSERT INTO cells(project_id, annotator, line, code_id, value, rationale, updated_at, revision) "
            "VALUES(?,?,?,?,?,?,?,1)");
        s.bind(1, id).bind(2, c.annotator).bind(3, std::int64_t{c.line}).bind(4, c.code_id);
        s.bind(5, codec::encode(c.value).dump()).bind(6, c.rationale).bind(7, millis(c.updated_at)).run();
        auto h = db_->prepare(
            "INSERT INTO cell_revisions(project_id, annotator, line, code_id, revision, value, updated_at) "
            "VALUES(?,?,?,?,1,?,?)");
        h.bind(1, id).bind(2, c.annotator).bind(3, std::int64_t{c.line}).bind(4, c.code_id);
        h.bind(5, codec::encode(c.value).dump()).bind(6, millis(c.updated_at)).run();
        st.cells.emplace(c.key(), StoredCell{c, false});
      }
      for (const auto& n : contents.notes) {
        auto s = db_->prepare("INSERT INTO notes(project_id, annotator, line, text, updated_at) VALUES(?,?,?,?,?)");
        s.bind(1, id).bind(2, n.annotator).bind(3, std::int64_t{n.line}).bind(4, n.text).bind(5, millis(n.updated_at)).run();
        st.notes.emplace(LineKey{n.annotator, n.line}, std::pair{n, false});
      }
      for (const auto& f : contents.flags) {
        if (!f.active) continue;
        auto s = db_->prepare("INSERT INTO flags(project_id, annotator, line, reason, updated_at) VALUES(?,?,?,?,?)");
        s.bind(1, id).bind(2, f.annotator).bind(3, std::int64_t{f.line}).bind(4, f.reason).bind(5, millis(f.updated_at)).run();
        st.flags.emplace(LineKey{f.annotator, f.line}, std::pair{f, false});
      }
      for (auto run : contents.runs) {
        auto s = db_->prepare("INSERT INTO llm_runs(project_id, run_id, body) VALUES(?,?,?)");
        s.bind(1, id).bind(2, run.run_id).bind(3, codec::encode(run, true).dump()).run();
        st.runs.emplace(run.run_id, std::move(run));
      }
    }
    tx.commit();
  } catch (...) {
    seq_ = prev_seq;
    throw;
  }
  requarantine(st);
  projects_.emplace(id, std::move(st));
  return id;
}

std::string Store::create_project(const std::string& name, const core::ProjectSettings& settings) {
  if (name.empty()) throw Error(errc::validation, "project name is empty", "name");
  core::validate_settings(settings);
  codec::BundleContents contents;
  contents.project.name = name;
  contents.project.settings = settings;
  std::lock_guard lock(mutex_);
  return insert_project(std::move(contents), false);
}

std::string Store::import_bundle(const codec::BundleContents& bundle) {
  std::lock_guard lock(mutex_);
  return insert_project(bundle, true);
}

std::vector<ProjectSummary> Store::list_projects() const {
  std::lock_guard lock(mutex_);
  std::vector<ProjectSummary> out;
  for (const auto& [id, st] : projects_) out.push_back({id, st.project->name});
  return out;
}

bool Store::has_project(const std::string& project_id) const {
  std::lock_guard lock(mutex_);
  return projects_.contains(project_id);
}

std::int64_t Store::replace_transcript(const std::string& project_id, core::Transcript transcript) {
  std::lock_guard lock(mutex_);
  auto& st = state_for(project_id);
  auto next = std::make_shared<core::Project>(*st.project);
  next->transcript = std::move(transcript);
  ProjectState draft{next, st.codebook_version, st.transcript_version + 1, st.seq, {}, {}, {}, {}, nullptr};
  const auto prev_seq = seq_;
  Transaction tx(*db_);
  touch(draft);
  try {
    persist_project_row(draft);
    tx.commit();
  } catch (...) {
    seq_ = prev_seq;
    throw;
  }
  st.project = std::move(next);
  st.transcript_version = draft.transcript_version;
  st.seq = draft.seq;
  st.cached.reset();
  requarantine(st);
  return st.transcript_version;
}

std::int64_t Store::replace_codebook(const std::string& project_id, core::Codebook codebook) {
  std::lock_guard lock(mutex_);
  auto& st = state_for(project_id);
  auto next = std::make_shared<core::Project>(*st.project);
  next->codebook = std::move(codebook);
  ProjectState draft{next, st.codebook_version + 1, st.transcript_version, st.seq, {}, {}, {}, {}, nullptr};
  const auto prev_seq = seq_;
  Transaction tx(*db_);
  touch(draft);
  try {
    persist_project_row(draft);
    tx.commit();
  } catch (...) {
    seq_ = prev_seq;
    throw;
  }
  st.project = std::move(next);
  st.codebook_version = draft.codebook_version;
  st.seq = draft.seq;
  st.cached.reset();
  requarantine(st);
  return st.codebook_version;
}

std::string Store::add_material(const std::string& project_id, core::Attachment attachment) {
  if (attachment.bytes.empty()) throw Error(errc::validation, "attachment is empty", "file");
  if (attachment.media_type.empty()) throw Error(errc::validation, "attachment media type is empty", "mediaType");
  std::lock_guard lock(mutex_);
  auto& st = state_for(project_id);
  if (attachment.id.empty()) attachment.id = "m-" + core::random_hex(6);
  auto next = std::make_shared<core::Project>(*st.project);
  Transaction tx(*db_);
  auto s = db_->prepare(
      "INSERT OR REPLACE INTO materials(project_id, id, kind, title, media_type, bytes) VALUES(?,?,?,?,?,?)");
  s.bind(1, project_id).bind(2, attachment.id).bind(3, core::to_string(attachment.kind)).bind(4, attachment.title);
  s.bind(5, attachment.media_type).bind_blob(6, attachment.bytes).run();
  auto& list = next->materials;
  std::erase_if(list, [&](const core::Attachment& a) { return a.id == attachment.id; });
  list.push_back(attachment);
  tx.commit();
  st.project = std::move(next);
  touch(st);
  return attachment.id;
}

void Store::update_settings(const std::string& project_id, const core::ProjectSettings& settings) {
  core::validate_settings(settings);
  std::lock_guard lock(mutex_);
  auto& st = state_for(project_id);
  auto next = std::make_shared<core::Project>(*st.project);
  next->settings = settings;
  ProjectState draft{next, st.codebook_version, st.transcript_version, st.seq, {}, {}, {}, {}, nullptr};
  Transaction tx(*db_);
  persist_project_row(draft);
  tx.commit();
  st.project = std::move(next);
  touch(st);
}

void Store::add_annotator(const std::string& project_id, const core::Annotator& annotator) {
  if (annotator.id.empty()) throw Error(errc::validation, "annotator id is empty", "id");
  if (annotator.kind != core::rater_kind_of(annotator.id)) {
    throw Error(errc::validation, "only LLM raters may (and must) use the llm: prefix", "id");
  }
  std::lock_guard lock(mutex_);
  auto& st = state_for(project_id);
  if (const auto* existing = st.project->find_annotator(annotator.id);
      existing != nullptr && (annotator.display_name.empty() || existing->display_name == annotator.display_name)) {
    return;
  }
  auto next = std::make_shared<core::Project>(*st.project);
  std::erase_if(next->annotators, [&](const core::Annotator& a) { return a.id == annotator.id; });
  core::Annotator a = annotator;
  if (a.display_name.empty()) a.display_name = a.id;
  next->annotators.push_back(std::move(a));
  std::sort(next->annotators.begin(), next->annotators.end(), [](const auto& x, const auto& y) { return x.id < y.id; });
  ProjectState draft{next, st.codebook_version, st.transcript_version, st.seq, {}, {}, {}, {}, nullptr};
  Transaction tx(*db_);
  persist_project_row(draft);
  tx.commit();
  st.project = std::move(next);
  touch(st);
}

std::int64_t Store::upsert_cell(const std::string& project_id, core::AnnotationCell cell) {
  std::lock_guard lock(mutex_);
  auto& st = state_for(project_id);
  const auto& p = *st.project;
  if (!p.codebook) throw Error(errc::unknown_code, "project has no codebook yet", "codeId");
  if (!p.transcript) throw Error(errc::line_out_of_range, "project has no transcript yet", "lineNumber");
  if (auto err = core::validate_cell(cell, *p.codebook, *p.transcript)) throw *err;
  require_member(p, cell.annotator);

  const auto key = cell.key();
  auto it = st.cells.find(key);
  cell.revision = it == st.cells.end() ? 1 : it->second.cell.revision + 1;
  cell.updated_at = now_utc();
  const std::string value = codec::encode(cell.value).dump();

  Transaction tx(*db_);
  auto s = db_->prepare(
      "INSERT OR REPLACE INTO cells(project_id, annotator, line, code_id, value, rationale, updated_at, revision) "
      "VALUES(?,?,?,?,?,?,?,?)");
  s.bind(1, project_id).bind(2, cell.annotator).bind(3, std::int64_t{cell.line}).bind(4, cell.code_id).bind(5, value);
  s.bind(6, cell.rationale).bind(7, millis(cell.updated_at)).bind(8, cell.revision).run();
  auto h = db_->prepare(
      "INSERT INTO cell_revisions(project_id, annotator, line, code_id, revision, value, updated_at) "
      "VALUES(?,?,?,?,?,?,?)");
  h.bind(1, project_id).bind(2, cell.annotator).bind(3, std::int64_t{cell.line}).bind(4, cell.code_id);
  h.bind(5, cell.revision).bind(6, value).bind(7, millis(cell.updated_at)).run();
  auto u = db_->prepare("UPDATE projects SET seq = ? WHERE id = ?");
  u.bind(1, static_cast<std::int64_t>(seq_ + 1)).bind(2, project_id).run();
  tx.commit();

  const auto revision = cell.revision;
  st.cells.insert_or_assign(key, StoredCell{std::move(cell), false});
  touch(st);
  return revision;
}

void Store::set_note(const std::string& project_id, core::NoteEntry note) {
  std::lock_guard lock(mutex_);
  auto& st = state_for(project_id);
  const auto& p = *st.project;
  if (!p.transcript) throw Error(errc::line_out_of_range, "project has no transcript yet", "lineNumber");
  if (auto err = core::validate_line(note.line, *p.transcript)) throw *err;
  require_member(p, note.annotator);
  note.updated_at = now_utc();

  Transaction tx(*db_);
  if (note.text.empty()) {
    auto s = db_->prepare("DELETE FROM notes WHERE project_id = ? AND annotator = ? AND line = ?");
    s.bind(1, project_id).bind(2, note.annotator).bind(3, std::int64_t{note.line}).run();
  } else {
    auto s = db_->prepare("INSERT OR REPLACE INTO notes(project_id, annotator, line, text, updated_at) VALUES(?,?,?,?,?)");
    s.bind(1, project_id).bind(2, note.annotator).bind(3, std::int64_t{note.line}).bind(4, note.text);
    s.bind(5, millis(note.updated_at)).run();
  }
  auto u = db_->prepare("UPDATE projects SET seq = ? WHERE id = ?");
  u.bind(1, static_cast<std::int64_t>(seq_ + 1)).bind(2, project_id).run();
  tx.commit();

  const LineKey key{note.annotator, note.line};
  if (note.text.empty()) {
    st.notes.erase(key);
  } else {
    st.notes.insert_or_assign(key, std::pair{std::move(note), false});
  }
  touch(st);
}

void Store::toggle_flag(const std::string& project_id, core::Flag flag) {
  std::lock_guard lock(mutex_);
  auto& st = state_for(project_id);
  const auto& p = *st.project;
  if (!p.transcript) throw Error(errc::line_out_of_range, "project has no transcript yet", "lineNumber");
  if (auto err = core::validate_line(flag.line, *p.transcript)) throw *err;
  require_member(p, flag.annotator);
  flag.updated_at = now_utc();

  Transaction tx(*db_);
  if (!flag.active) {
    auto s = db_->prepare("DELETE FROM flags WHERE project_id = ? AND annotator = ? AND line = ?");
    s.bind(1, project_id).bind(2, flag.annotator).bind(3, std::int64_t{flag.line}).run();
  } else {
    auto s = db_->prepare("INSERT OR REPLACE INTO flags(project_id, annotator, line, reason, updated_at) VALUES(?,?,?,?,?)");
    s.bind(1, project_id).bind(2, flag.annotator).bind(3, std::int64_t{flag.line}).bind(4, flag.reason);
    s.bind(5, millis(flag.updated_at)).run();
  }
  auto u = db_->prepare("UPDATE projects SET seq = ? WHERE id = ?");
  u.bind(1, static_cast<std::int64_t>(seq_ + 1)).bind(2, project_id).run();
  tx.commit();

  const LineKey key{flag.annotator, flag.line};
  if (!flag.active) {
    st.flags.erase(key);
  } else {
    st.flags.insert_or_assign(key, std::pair{std::move(flag), false});
  }
  touch(st);
}

std::shared_ptr<const Snapshot> Store::snapshot(const std::string& project_id) const {
  std::lock_guard lock(mutex_);
  const auto& st = state_for(project_id);
  if (st.cached) return st.cached;
  auto snap = std::make_shared<Snapshot>();
  snap->project_id = project_id;
  snap->as_of = st.seq;
  snap->project = st.project;
  snap->codebook_version = st.codebook_version;
  snap->transcript_version = st.transcript_version;
  snap->cells.reserve(st.cells.size());
  for (const auto& [key, stored] : st.cells) {
    if (!stored.quarantined) snap->cells.push_back(stored.cell);
  }
  for (const auto& [key, entry] : st.notes) {
    if (!entry.second) snap->notes.push_back(entry.first);
  }
  for (const auto& [key, entry] : st.flags) {
    if (!entry.second) snap->flags.push_back(entry.first);
  }
  for (const auto& [id, run] : st.runs) {
    llm::LlmRunResult meta = run;
    meta.cells.clear();
    snap->runs.push_back(std::move(meta));
  }
  std::sort(snap->runs.begin(), snap->runs.end(), [](const auto& a, const auto& b) {
    return std::tie(a.created_at, a.run_id) < std::tie(b.created_at, b.run_id);
  });
  st.cached = snap;
  return snap;
}

std::vector<std::int64_t> Store::revision_history(const std::string& project_id, const core::CellKey& key) const {
  std::lock_guard lock(mutex_);
  auto s = db_->prepare(
      "SELECT revision FROM cell_revisions WHERE project_id = ? AND annotator = ? AND line = ? AND code_id = ? "
      "ORDER BY revision");
  s.bind(1, project_id).bind(2, key.annotator).bind(3, std::int64_t{key.line}).bind(4, key.code_id);
  std::vector<std::int64_t> out;
  while (s.step()) out.push_back(s.integer(0));
  return out;
}

std::vector<core::AnnotationCell> Store::quarantined_cells(const std::string& project_id) const {
  std::lock_guard lock(mutex_);
  std::vector<core::AnnotationCell> out;
  for (const auto& [key, stored] : state_for(project_id).cells) {
    if (stored.quarantined) out.push_back(stored.cell);
  }
  return out;
}

void Store::save_run(const std::string& project_id, const llm::LlmRunResult& run) {
  std::lock_guard lock(mutex_);
  auto& st = state_for(project_id);
  Transaction tx(*db_);
  auto s = db_->prepare("INSERT OR REPLACE INTO llm_runs(project_id, run_id, body) VALUES(?,?,?)");
  s.bind(1, project_id).bind(2, run.run_id).bind(3, codec::encode(run, true).dump()).run();
  tx.commit();
  st.runs.insert_or_assign(run.run_id, run);
  touch(st);
}

std::optional<llm::LlmRunResult> Store::find_run(const std::string& project_id, const std::string& run_id) const {
  std::lock_guard lock(mutex_);
  const auto& st = state_for(project_id);
  auto it = st.runs.find(run_id);
  if (it == st.runs.end()) return std::nullopt;
  return it->second;
}

void Store::put_token(const std::string& token, const TokenRecord& record) {
  std::lock_guard lock(mutex_);
  auto s = db_->prepare("INSERT OR REPLACE INTO tokens(token, annotator, role) VALUES(?,?,?)");
  s.bind(1, token).bind(2, record.annotator_id).bind(3, role_name(record.role)).run();
}

std::optional<TokenRecord> Store::find_token(const std::string& token) const {
  std::lock_guard lock(mutex_);
  auto s = db_->prepare("SELECT annotator, role FROM tokens WHERE token = ?");
  s.bind(1, token);
  if (!s.step()) return std::nullopt;
  return TokenRecord{s.text(0), s.text(1) == "administrator" ? Role::administrator : Role::annotator};
}

std::optional<std::string> Store::token_for(const std::string& annotator_id) const {
  std::lock_guard lock(mutex_);
  auto s = db_->prepare("SELECT token FROM tokens WHERE annotator = ? AND role = 'annotator'");
  s.bind(1, annotator_id);
  if (!s.step()) return std::nullopt;
  return s.text(0);
}

std::optional<std::string> Store::meta(const std::string& key) const {
  std::lock_guard lock(mutex_);
  auto s = db_->prepare("SELECT value FROM meta WHERE key = ?");
  s.bind(1, key);
  if (!s.step()) return std::nullopt;
  return s.text(0);
}

void Store::set_meta(const std::string& key, const std::string& value) {
  std::lock_guard lock(mutex_);
  auto s = db_->prepare("INSERT OR REPLACE INTO meta(key, value) VALUES(?,?)");
  s.bind(1, key).bind(2, value).run();
}

}  // namespace educoder::store
