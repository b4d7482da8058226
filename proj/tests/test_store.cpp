#include "doctest.h"

#include <filesystem>
#include <thread>

#include "builders.hpp"

#include "educoder/codec/json_codec.hpp"
#include "educoder/core/error.hpp"
#include "educoder/core/ids.hpp"
#include "educoder/ingest/bundle.hpp"
#include "educoder/ingest/table.hpp"
#include "educoder/store/export.hpp"
#include "educoder/store/store.hpp"

using namespace educoder;

namespace {

struct TempFile {
  std::filesystem::path path;
  TempFile() : path(std::filesystem::temp_directory_path() / ("educoder-test-" + core::random_hex(6) + ".db")) {}
  ~TempFile() {
    for (const char* suffix : {"", "-wal", "-shm"}) std::filesystem::remove(path.string() + suffix);
  }
};

std::string two_coder_project(store::Store& s) {
  const auto id = s.create_project("store test");
  s.replace_transcript(id, fixtures::transcript({{"T", "one", "a"}, {"S", "two", "a"}, {"T", "three", "b"}}));
  s.replace_codebook(id, fixtures::codebook({{"Uptake", "d", "", "binary"}, {"Memo", "d", "", "free_text"}}));
  s.add_annotator(id, {"ana", core::RaterKind::human, "Ana"});
  s.add_annotator(id, {"ben", core::RaterKind::human, "Ben"});
  return id;
}

void expect_error(auto&& fn, std::string_view code) {
  try {
    fn();
    FAIL("expected " << code);
  } catch (const Error& e) {
    CHECK(e.code() == code);
  }
}

codec::Json comparable_bundle(const store::Snapshot& snap) {
  auto j = codec::Json::parse(store::export_bundle_json(snap));
  j["project"].erase("id");
  return j;
}

}  // namespace

TEST_CASE("cell revisions and last write wins") {
  store::Store s;
  const auto id = two_coder_project(s);
  CHECK(s.upsert_cell(id, fixtures::cell("ana", 1, "uptake", true)) == 1);
  CHECK(s.upsert_cell(id, fixtures::cell("ana", 1, "uptake", false)) == 2);
  CHECK(s.upsert_cell(id, fixtures::cell("ben", 1, "uptake", true)) == 1);
  const auto snap = s.snapshot(id);
  REQUIRE(snap->cells.size() == 2);
  CHECK(snap->cells[0].annotator == "ana");
  CHECK(snap->cells[0].value == core::CellValue{false});
  CHECK(snap->cells[0].revision == 2);
  CHECK(snap->cells[0].updated_at.time_since_epoch().count() > 0);
  CHECK(s.revision_history(id, {"ana", 1, "uptake"}) == std::vector<std::int64_t>{1, 2});
}

TEST_CASE("cell write errors") {
  store::Store s;
  const auto id = two_coder_project(s);
  expect_error([&] { (void)s.upsert_cell("p-missing", fixtures::cell("ana", 1, "uptake", true)); }, errc::unknown_project);
  expect_error([&] { (void)s.upsert_cell(id, fixtures::cell("zed", 1, "uptake", true)); }, errc::annotator_not_member);
  expect_error([&] { (void)s.upsert_cell(id, fixtures::cell("ana", 4, "uptake", true)); }, errc::line_out_of_range);
  expect_error([&] { (void)s.upsert_cell(id, fixtures::cell("ana", 1, "nope", true)); }, errc::unknown_code);
  expect_error([&] { (void)s.upsert_cell(id, fixtures::cell("ana", 1, "memo", true)); }, errc::value_type_mismatch);
  expect_error([&] { s.set_note(id, {"ana", 9, "x", {}}); }, errc::line_out_of_range);
  expect_error([&] { s.toggle_flag(id, {"zed", 1, std::nullopt, true, {}}); }, errc::annotator_not_member);
  CHECK(s.snapshot(id)->cells.empty());
}

TEST_CASE("notes and flags") {
  store::Store s;
  const auto id = two_coder_project(s);
  s.set_note(id, {"ana", 2, "  keep  spacing\n", {}});
  s.set_note(id, {"ben", 2, "other view", {}});
  s.toggle_flag(id, {"ana", 3, "discuss", true, {}});
  auto snap = s.snapshot(id);
  REQUIRE(snap->notes.size() == 2);
  CHECK(snap->notes[0].text == "  keep  spacing\n");
  REQUIRE(snap->flags.size() == 1);
  CHECK(snap->flags[0].reason == "discuss");

  s.toggle_flag(id, {"ana", 3, std::nullopt, false, {}});
  s.set_note(id, {"ben", 2, "", {}});
  snap = s.snapshot(id);
  CHECK(snap->flags.empty());
  REQUIRE(snap->notes.size() == 1);
  CHECK(snap->notes[0].annotator == "ana");
}

TEST_CASE("snapshots are immutable and ordered") {
  store::Store s;
  const auto id = two_coder_project(s);
  const auto first = s.snapshot(id);
  CHECK(s.snapshot(id) == first);
  s.upsert_cell(id, fixtures::cell("ana", 1, "uptake", true));
  const auto second = s.snapshot(id);
  CHECK(second->as_of > first->as_of);
  CHECK(first->cells.empty());
  CHECK(second->cells.size() == 1);
  expect_error([&] { (void)s.snapshot("p-nope"); }, errc::unknown_project);
}

TEST_CASE("schema replacement quarantines and restores") {
  store::Store s;
  const auto id = two_coder_project(s);
  s.upsert_cell(id, fixtures::cell("ana", 3, "uptake", true));
  s.upsert_cell(id, fixtures::cell("ana", 1, "uptake", false));
  s.set_note(id, {"ben", 3, "late line", {}});

  // Same line count: nothing moves.
  CHECK(s.replace_transcript(id, fixtures::transcript({{"T", "uno", ""}, {"S", "dos", ""}, {"T", "tres", ""}})) == 2);
  CHECK(s.snapshot(id)->cells.size() == 2);

  CHECK(s.replace_transcript(id, fixtures::transcript({{"T", "uno", ""}, {"S", "dos", ""}})) == 3);
  auto snap = s.snapshot(id);
  CHECK(snap->transcript_version == 3);
  REQUIRE(snap->cells.size() == 1);
  CHECK(snap->cells[0].line == 1);
  CHECK(snap->notes.empty());
  REQUIRE(s.quarantined_cells(id).size() == 1);
  CHECK(s.quarantined_cells(id)[0].line == 3);

  s.replace_transcript(id, fixtures::transcript({{"T", "uno", ""}, {"S", "dos", ""}, {"T", "tres", ""}}));
  snap = s.snapshot(id);
  CHECK(snap->cells.size() == 2);
  CHECK(snap->notes.size() == 1);
  CHECK(s.quarantined_cells(id).empty());

  s.replace_codebook(id, fixtures::codebook({{"Uptake", "d", "", "free_text"}}));
  CHECK(s.snapshot(id)->cells.empty());
  CHECK(s.quarantined_cells(id).size() == 2);
  expect_error([&] { (void)s.upsert_cell(id, fixtures::cell("ana", 1, "uptake", true)); }, errc::value_type_mismatch);
}

TEST_CASE("membership") {
  store::Store s;
  const auto id = two_coder_project(s);
  s.add_annotator(id, {"ana", core::RaterKind::human, ""});
  auto snap = s.snapshot(id);
  CHECK(snap->project->annotators.size() == 2);
  CHECK(snap->project->find_annotator("ana")->display_name == "Ana");
  CHECK_THROWS_AS(s.add_annotator(id, {"llm:x", core::RaterKind::human, ""}), Error);
  CHECK_THROWS_AS(s.add_annotator(id, {"", core::RaterKind::human, ""}), Error);
  CHECK_THROWS_AS(s.update_settings(id, {1.5, core::PoolingMode::both}), Error);
}

TEST_CASE("state survives reopening the data file") {
  TempFile file;
  std::string id;
  std::uint64_t as_of = 0;
  codec::Json before;
  {
    store::Store s(file.path);
    id = two_coder_project(s);
    s.upsert_cell(id, fixtures::cell("ana", 1, "uptake", true));
    s.upsert_cell(id, fixtures::cell("ana", 1, "uptake", false));
    s.upsert_cell(id, fixtures::cell("ben", 2, "memo", std::string("why?")));
    s.set_note(id, {"ana", 1, "note", {}});
    s.toggle_flag(id, {"ben", 3, std::nullopt, true, {}});
    s.add_material(id, {"", core::AttachmentKind::image, "board", "image/png", std::string("\x89PNG\0\1", 6)});
    s.put_token("tok-1", {"ana", store::Role::annotator});
    s.set_meta("k", "v");
    s.replace_transcript(id, fixtures::transcript({{"T", "one", ""}}));
    before = comparable_bundle(*s.snapshot(id));
    as_of = s.snapshot(id)->as_of;
  }
  store::Store s(file.path);
  CHECK(s.has_project(id));
  const auto snap = s.snapshot(id);
  CHECK(comparable_bundle(*snap) == before);
  CHECK(snap->as_of >= as_of);
  CHECK(snap->project->materials.at(0).bytes == std::string("\x89PNG\0\1", 6));
  CHECK(s.quarantined_cells(id).size() == 1);
  CHECK(s.revision_history(id, {"ana", 1, "uptake"}) == std::vector<std::int64_t>{1, 2});
  CHECK(s.find_token("tok-1")->annotator_id == "ana");
  CHECK(s.token_for("ana") == "tok-1");
  CHECK(s.meta("k") == "v");
  CHECK_FALSE(s.find_token("nope"));
  REQUIRE(snap->cells.size() == 1);
  CHECK(snap->cells[0].revision == 2);
  CHECK(s.upsert_cell(id, fixtures::cell("ana", 1, "uptake", true)) == 3);
}

TEST_CASE("concurrent writers to distinct keys") {
  store::Store s;
  const auto id = s.create_project("parallel");
  std::vector<std::vector<std::string>> lines(50, {"T", "x", ""});
  s.replace_transcript(id, fixtures::transcript(lines));
  s.replace_codebook(id, fixtures::codebook({{"A", "d", "", "binary"}, {"B", "d", "", "binary"}}));
  for (int w = 0; w < 8; ++w) s.add_annotator(id, {"w" + std::to_string(w), core::RaterKind::human, ""});
  {
    std::vector<std::jthread> writers;
    for (int w = 0; w < 8; ++w) {
      writers.emplace_back([&, w] {
        for (int line = 1; line <= 50; ++line) s.upsert_cell(id, fixtures::cell("w" + std::to_string(w), line, "a", true));
      });
    }
  }
  const auto snap = s.snapshot(id);
  CHECK(snap->cells.size() == 400);
  for (const auto& c : snap->cells) CHECK(c.revision == 1);
}

TEST_CASE("annotations csv") {
  store::Store s;
  const auto id = two_coder_project(s);
  CHECK(store::export_annotations_csv(*s.snapshot(id)) ==
        "line,speaker,text,segment,annotator,code,value,rationale,note,flag,updated_at\r\n");

  auto c = fixtures::cell("ana", 2, "uptake", true);
  c.rationale = "says \"why\"";
  s.upsert_cell(id, c);
  const auto one = store::export_annotations_csv(*s.snapshot(id));
  const auto body = one.substr(one.find("\r\n") + 2);
  CHECK(std::count(body.begin(), body.end(), '\n') == 1);
  CHECK(body.starts_with("2,S,two,a,ana,uptake,true,\"says \"\"why\"\"\",,,20"));
  CHECK(body.ends_with("Z\r\n"));

  s.set_note(id, {"ben", 1, "first, note", {}});
  s.toggle_flag(id, {"ana", 2, std::nullopt, true, {}});
  s.upsert_cell(id, fixtures::cell("ben", 2, "memo", std::string("a\nb")));
  const auto snap = s.snapshot(id);
  const auto csv = store::export_annotations_csv(*snap);
  CHECK(csv == store::export_annotations_csv(*snap));
  const auto rows = ingest::read_csv(csv).rows;
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].cells[4] == "ben");
  CHECK(rows[0].cells[5] == "");
  CHECK(rows[0].cells[8] == "first, note");
  CHECK(rows[1].cells[5] == "memo");
  CHECK(rows[1].cells[6] == "a\nb");
  CHECK(rows[1].cells[9] == "");
  CHECK(rows[2].cells[5] == "uptake");
  CHECK(rows[2].cells[9] == "true");
}

TEST_CASE("bundle round trip through the store") {
  for (std::uint64_t seed = 1; seed <= 25; ++seed) {
    CAPTURE(seed);
    store::Store s;
    fixtures::RandomProject gen(seed);
    const auto id = gen.build(s);
    const auto snap = s.snapshot(id);
    const auto json = store::export_bundle_json(*snap);
    const auto copy = s.import_bundle(ingest::import_annotated_bundle(json));
    CHECK(copy != id);
    const auto again = s.snapshot(copy);
    CHECK(comparable_bundle(*again) == comparable_bundle(*snap));
    CHECK(store::export_annotations_csv(*again) == store::export_annotations_csv(*snap));
    for (const auto& cell : again->cells) CHECK(cell.revision == 1);
    CHECK(store::snapshot_from_bundle(ingest::import_annotated_bundle(json)).cells.size() == snap->cells.size());
  }
}
