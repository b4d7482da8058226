#pragma once
// The only mutable component. Every mutation is validated, committed to the
// data file, and only then made visible. Readers work from immutable
// snapshots.

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "educoder/codec/json_codec.hpp"
#include "educoder/core/model.hpp"
#include "educoder/llm/types.hpp"

namespace educoder::store {

class Database;

struct Snapshot {
  std::string project_id;
  std::uint64_t as_of = 0;
  std::shared_ptr<const core::Project> project;
  std::int64_t codebook_version = 0;
  std::int64_t transcript_version = 0;
  std::vector<core::AnnotationCell> cells;  // live, non-quarantined; sorted by key
  std::vector<core::NoteEntry> notes;       // sorted by (annotator, line)
  std::vector<core::Flag> flags;            // active only; sorted by (annotator, line)
  std::vector<llm::LlmRunResult> runs;      // metadata without cells, by creation time
};

enum class Role { administrator, annotator };

struct TokenRecord {
  std::string annotator_id;
  Role role = Role::annotator;
};

struct ProjectSummary {
  std::string id;
  std::string name;
};

class Store {
 public:
  /// Opens (creating if needed) the data file; an empty path keeps
  /// everything in memory.
  explicit Store(const std::filesystem::path& path = {});
  ~Store();
  Store(const Store&) = delete;
  Store& operator=(const Store&) = delete;

  std::string create_project(const std::string& name, const core::ProjectSettings& settings = {});
  /// Creates a new project from imported contents; returns its fresh id.
  std::string import_bundle(const codec::BundleContents& bundle);
  [[nodiscard]] std::vector<ProjectSummary> list_projects() const;
  [[nodiscard]] bool has_project(const std::string& project_id) const;

  // Replacing a transcript or codebook bumps its version and re-checks every
  // cell, note and flag; the ones that no longer validate are quarantined
  // (kept on disk, hidden from snapshots) until a later replacement fits them.
  std::int64_t replace_transcript(const std::string& project_id, core::Transcript transcript);
  std::int64_t replace_codebook(const std::string& project_id, core::Codebook codebook);
  std::string add_material(const std::string& project_id, core::Attachment attachment);
  void update_settings(const std::string& project_id, const core::ProjectSettings& settings);
  /// Idempotent; an existing member keeps its display name unless a new one is given.
  void add_annotator(const std::string& project_id, const core::Annotator& annotator);

  /// Returns the stored revision. updated_at is set to the receipt time.
  std::int64_t upsert_cell(const std::string& project_id, core::AnnotationCell cell);
  /// Empty text removes the note.
  void set_note(const std::string& project_id, core::NoteEntry note);
  /// active=false clears the flag.
  void toggle_flag(const std::string& project_id, core::Flag flag);

  [[nodiscard]] std::shared_ptr<const Snapshot> snapshot(const std::string& project_id) const;
  /// Every revision ever written for the key, ascending.
  [[nodiscard]] std::vector<std::int64_t> revision_history(const std::string& project_id, const core::CellKey& key) const;
  [[nodiscard]] std::vector<core::AnnotationCell> quarantined_cells(const std::string& project_id) const;

  /// Inserts or replaces a run record (including its cells, for polling).
  void save_run(const std::string& project_id, const llm::LlmRunResult& run);
  [[nodiscard]] std::optional<llm::LlmRunResult> find_run(const std::string& project_id, const std::string& run_id) const;

  void put_token(const std::string& token, const TokenRecord& record);
  [[nodiscard]] std::optional<TokenRecord> find_token(const std::string& token) const;
  [[nodiscard]] std::optional<std::string> token_for(const std::string& annotator_id) const;

  [[nodiscard]] std::optional<std::string> meta(const std::string& key) const;
  void set_meta(const std::string& key, const std::string& value);

 private:
  struct StoredCell {
    core::AnnotationCell cell;
    bool quarantined = false;
  };
  using LineKey = std::pair<std::string, core::LineNumber>;  // (annotator, line)
  struct ProjectState {
    std::shared_ptr<const core::Project> project;
    std::int64_t codebook_version = 0;
    std::int64_t transcript_version = 0;
    std::uint64_t seq = 0;
    std::map<core::CellKey, StoredCell> cells;
    std::map<LineKey, std::pair<core::NoteEntry, bool>> notes;  // value, quarantined
    std::map<LineKey, std::pair<core::Flag, bool>> flags;
    std::map<std::string, llm::LlmRunResult> runs;
    mutable std::shared_ptr<const Snapshot> cached;
  };

  ProjectState& state_for(const std::string& project_id);
  const ProjectState& state_for(const std::string& project_id) const;
  void load();
  void requarantine(ProjectState& state);
  void persist_project_row(const ProjectState& state);
  void touch(ProjectState& state);
  std::string insert_project(codec::BundleContents contents, bool preserve_cells);

  std::unique_ptr<Database> db_;
  mutable std::mutex mutex_;
  std::map<std::string, ProjectState> projects_;
  std::uint64_t seq_ = 0;
};

}  // namespace educoder::store
