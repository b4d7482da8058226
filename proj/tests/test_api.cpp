#include "doctest.h"

#include <chrono>

#include "builders.hpp"
#include "live_server.hpp"

#include "educoder/codec/json_codec.hpp"

using namespace educoder;
using codec::Json;

namespace {

api::FormPart file_part(std::string content, std::string filename, std::string type = "text/csv") {
  return {"file", std::move(content), std::move(filename), std::move(type)};
}

Json body_of(const api::ApiResponse& r) { return Json::parse(r.body); }

std::string error_code(const api::ApiResponse& r) { return body_of(r)["error"]["code"].get<std::string>(); }

const std::string kTranscript = fixtures::csv({{"Speaker", "Text", "Segment"},
                                               {"Teacher", "What do you notice?", "launch"},
                                               {"Student", "It doubles.", "launch"},
                                               {"Teacher", "Why does it double?", "discuss"},
                                               {"Student", "Because of the ratio.", "discuss"}});
const std::string kCodebook = fixtures::csv({{"code", "definition", "category", "value_kind"},
                                             {"Uptake", "Builds on a student idea.", "Teacher", "binary"},
                                             {"Press", "Asks for reasoning.", "Teacher", "binary"},
                                             {"Memo", "Anything else.", "", "free_text"}});

struct Project {
  std::string id;
  std::string ana_token;
  std::string ben_token;
};

Project setup(fixtures::LiveServer& live) {
  auto admin = live.admin();
  Project p;
  auto created = admin->post_json("/api/projects", R"({"name":"Ratios lesson"})");
  REQUIRE(created.status == 201);
  p.id = body_of(created)["id"];
  const auto base = "/api/projects/" + p.id;
  REQUIRE(admin->post_form(base + "/transcript", {file_part(kTranscript, "t.csv")}).status == 200);
  REQUIRE(admin->post_form(base + "/codebook", {file_part(kCodebook, "c.csv")}).status == 200);
  p.ana_token = body_of(admin->post_json(base + "/annotators", R"({"id":"ana","displayName":"Ana"})"))["token"];
  p.ben_token = body_of(admin->post_json(base + "/annotators", R"({"id":"ben"})"))["token"];
  return p;
}

std::string cells_body(const std::string& annotator, std::initializer_list<std::tuple<int, const char*, bool>> cells) {
  Json arr = Json::array();
  for (const auto& [line, code, value] : cells) {
    arr.push_back({{"annotator", annotator}, {"lineNumber", line}, {"codeId", code}, {"value", value}});
  }
  return Json{{"cells", arr}}.dump();
}

}  // namespace

TEST_CASE("health and authentication") {
  fixtures::LiveServer live;
  CHECK(live.client("")->get("/api/health").status == 200);
  const auto anon = live.client("")->get("/api/projects");
  CHECK(anon.status == 401);
  CHECK(error_code(anon) == "unauthenticated");
  CHECK(live.client("wrong")->get("/api/projects").status == 401);
  CHECK(live.admin()->get("/api/projects").status == 200);
  CHECK(live.admin()->get("/api/projects/p-nothere").status == 404);
}

TEST_CASE("role matrix") {
  fixtures::LiveServer live;
  const auto p = setup(live);
  const auto base = "/api/projects/" + p.id;
  auto ana = live.client(p.ana_token);

  CHECK(ana->get(base).status == 200);
  CHECK(ana->get(base + "/utterances").status == 200);
  CHECK(ana->get(base + "/irr").status == 200);
  CHECK(ana->get(base + "/comparison").status == 200);
  CHECK(ana->put_json(base + "/annotations/cells", cells_body("ana", {{1, "uptake", true}})).status == 200);

  CHECK(ana->post_json("/api/projects", R"({"name":"x"})").status == 403);
  CHECK(ana->put_json(base + "/settings", R"({"lowAgreementThreshold":0.5})").status == 403);
  CHECK(ana->post_json(base + "/annotators", R"({"id":"eve"})").status == 403);
  CHECK(ana->post_form(base + "/transcript", {file_part(kTranscript, "t.csv")}).status == 403);
  CHECK(ana->post_form(base + "/codebook", {file_part(kCodebook, "c.csv")}).status == 403);
  CHECK(ana->post_form(base + "/materials", {file_part("x", "x.txt", "text/plain")}).status == 403);
  CHECK(ana->get(base + "/export").status == 403);
  CHECK(ana->post_json(base + "/llm-runs", "{}").status == 403);
  CHECK(ana->get(base + "/llm-runs").status == 403);
  CHECK(ana->post_json("/api/projects/import", "{}").status == 403);

  // Ana is not a member of a second project and does not see it.
  auto admin = live.admin();
  const std::string other = body_of(admin->post_json("/api/projects", R"({"name":"Other"})"))["id"];
  CHECK(ana->get("/api/projects/" + other).status == 403);
  const auto listed = body_of(ana->get("/api/projects"))["projects"];
  REQUIRE(listed.size() == 1);
  CHECK(listed[0]["id"] == p.id);
  CHECK(body_of(admin->get("/api/projects"))["projects"].size() == 2);

  // Reserved ids.
  CHECK(admin->post_json(base + "/annotators", R"({"id":"admin"})").status == 400);
  CHECK(admin->post_json(base + "/annotators", R"({"id":"llm:x:y"})").status == 400);
  // Minting is idempotent.
  CHECK(body_of(admin->post_json(base + "/annotators", R"({"id":"ana"})"))["token"] == p.ana_token);
}

TEST_CASE("uploads report ingestion errors verbatim") {
  fixtures::LiveServer live;
  auto admin = live.admin();
  const std::string id = body_of(admin->post_json("/api/projects", R"({"name":"u"})"))["id"];
  const auto base = "/api/projects/" + id;

  const auto no_speaker = admin->post_form(base + "/transcript", {file_part("Text\nhello\n", "t.csv")});
  CHECK(no_speaker.status == 422);
  CHECK(error_code(no_speaker) == "missingSpeakerColumn");

  const auto empty_speaker = admin->post_form(base + "/transcript", {file_part("Speaker,Text\nT,hi\n,oops\n", "t.csv")});
  CHECK(empty_speaker.status == 422);
  const auto err = body_of(empty_speaker)["error"];
  CHECK(err["code"] == "emptySpeaker");
  CHECK(err["row"] == 3);

  const auto dup = admin->post_form(base + "/codebook", {file_part("code,definition\nA,x\na,y\n", "c.csv")});
  CHECK(dup.status == 422);
  CHECK(error_code(dup) == "duplicateCodeName");

  CHECK(admin->post_json(base + "/transcript", "{}").status == 400);

  const auto mapped = admin->post_form(
      base + "/transcript",
      {file_part("Who,Said\nT,hi\nS,yo\n", "t.csv"), {"mapping", R"({"speakerColumn":"Who","textColumn":"Said"})", "", ""}});
  REQUIRE(mapped.status == 200);
  CHECK(body_of(mapped)["lineCount"] == 2);
  CHECK(body_of(mapped)["transcriptVersion"] == 1);

  const auto material = admin->post_form(base + "/materials", {file_part("Plan text", "plan.txt", "text/plain")});
  REQUIRE(material.status == 200);
  const std::string mid = body_of(material)["id"];
  CHECK(body_of(material)["kind"] == "instructions");
  const auto fetched = admin->get(base + "/materials/" + mid);
  CHECK(fetched.body == "Plan text");
  CHECK(fetched.content_type == "text/plain");
  CHECK(admin->get(base + "/materials/m-none").status == 404);
}

TEST_CASE("batch writes report each item") {
  fixtures::LiveServer live;
  const auto p = setup(live);
  const auto base = "/api/projects/" + p.id;
  auto ana = live.client(p.ana_token);

  Json items = Json::array({
      {{"lineNumber", 1}, {"codeId", "uptake"}, {"value", true}},
      {{"lineNumber", 9}, {"codeId", "uptake"}, {"value", true}},
      {{"lineNumber", 2}, {"codeId", "nope"}, {"value", false}},
      {{"lineNumber", 2}, {"codeId", "memo"}, {"value", true}},
      {{"lineNumber", 2}, {"codeId", "memo"}, {"value", "free words"}},
      {{"lineNumber", 1}, {"codeId", "uptake"}, {"value", false}},
  });
  const auto r = ana->put_json(base + "/annotations/cells", items.dump());
  REQUIRE(r.status == 200);
  const auto out = body_of(r);
  CHECK(out["failed"] == 3);
  const auto& res = out["results"];
  CHECK(res[0]["ok"] == true);
  CHECK(res[0]["revision"] == 1);
  CHECK(res[1]["error"]["code"] == "lineOutOfRange");
  CHECK(res[2]["error"]["code"] == "unknownCode");
  CHECK(res[3]["error"]["code"] == "valueTypeMismatch");
  CHECK(res[4]["ok"] == true);
  CHECK(res[5]["revision"] == 2);

  const auto forged = ana->put_json(base + "/annotations/cells", cells_body("ben", {{1, "uptake", true}}));
  CHECK(forged.status == 403);
  const auto llm = live.admin()->put_json(base + "/annotations/cells", cells_body("llm:mock:m1", {{1, "uptake", true}}));
  CHECK(body_of(llm)["results"][0]["error"]["code"] == "llmCellsImmutable");
  CHECK(ana->put_json(base + "/annotations/cells", "not json").status == 400);

  CHECK(body_of(ana->put_json(base + "/annotations/notes", R"([{"lineNumber":2,"text":"unclear"}])"))["failed"] == 0);
  CHECK(body_of(ana->put_json(base + "/annotations/flags", R"([{"lineNumber":3,"reason":"discuss"}])"))["failed"] == 0);

  const auto lines = body_of(ana->get(base + "/utterances"))["lines"];
  REQUIRE(lines.size() == 4);
  CHECK(lines[0]["cells"]["uptake"]["value"] == false);
  CHECK(lines[0]["cells"]["uptake"]["revision"] == 2);
  CHECK(lines[1]["note"] == "unclear");
  CHECK(lines[1]["cells"]["memo"]["value"] == "free words");
  CHECK(lines[2]["flagged"] == true);
  CHECK(lines[2]["flagReason"] == "discuss");
  // Ben sees none of Ana's work.
  CHECK(body_of(live.client(p.ben_token)->get(base + "/utterances"))["lines"][0]["cells"].empty());
}

TEST_CASE("utterance filters") {
  fixtures::LiveServer live;
  const auto p = setup(live);
  const auto base = "/api/projects/" + p.id;
  auto ana = live.client(p.ana_token);
  auto numbers = [&](const std::string& query) {
    std::vector<int> out;
    const auto body = body_of(ana->get(base + "/utterances" + query));
    for (const auto& l : body["lines"]) out.push_back(l["lineNumber"]);
    return out;
  };
  CHECK(numbers("?speakers=Student") == std::vector{2, 4});
  CHECK(numbers("?keyword=DOUBLE") == std::vector{2, 3});
  CHECK(numbers("?segment=discuss") == std::vector{3, 4});
  CHECK(numbers("?from=2&to=3") == std::vector{2, 3});
  CHECK(numbers("?speakers=Student&from=3") == std::vector{4});
  const auto bad = ana->get(base + "/utterances?from=3&to=9");
  CHECK(bad.status == 400);
  CHECK(error_code(bad) == "lineRangeOutOfBounds");
  CHECK(ana->get(base + "/utterances?from=x").status == 400);
}

TEST_CASE("irr, comparison and asOf") {
  fixtures::LiveServer live;
  const auto p = setup(live);
  const auto base = "/api/projects/" + p.id;
  auto ana = live.client(p.ana_token);
  auto ben = live.client(p.ben_token);
  ana->put_json(base + "/annotations/cells",
                cells_body("ana", {{1, "uptake", true}, {2, "uptake", false}, {3, "uptake", true}, {4, "uptake", false}}));
  ben->put_json(base + "/annotations/cells",
                cells_body("ben", {{1, "uptake", true}, {2, "uptake", false}, {3, "uptake", false}, {4, "uptake", false}}));

  const auto irr = ana->get(base + "/irr");
  REQUIRE(irr.status == 200);
  const auto report = body_of(irr);
  CHECK(report["raters"] == Json::array({"ana", "ben"}));
  CHECK(report["perCode"]["uptake"]["kappaPairwiseMean"].get<double>() == doctest::Approx(0.5));
  CHECK(report["perCode"]["press"]["kappaPairwiseMean"] == "undefined");
  CHECK(report["lowAgreementCodes"] == Json::array({"uptake"}));

  const auto only = body_of(ana->get(base + "/irr?codes=uptake&raters=ana,ben"));
  CHECK(only["perCode"].size() == 1);
  CHECK(ana->get(base + "/irr?raters=ana,zed").status == 400);
  CHECK(ana->get(base + "/irr?codes=memo").status == 400);

  // LLM run, then includeLlm.
  auto admin = live.admin();
  const auto started = admin->post_json(
      base + "/llm-runs", R"({"providerId":"mock","model":"m1","features":["uptake","press"],"lineRange":{"start":1,"end":4}})");
  REQUIRE(started.status == 202);
  live.server.runs().wait_idle();
  CHECK(body_of(ana->get(base + "/irr"))["raters"].size() == 2);
  CHECK(body_of(ana->get(base + "/irr?includeLlm=true"))["raters"].size() == 3);

  const auto cmp = body_of(ana->get(base + "/comparison?from=3&to=4"));
  CHECK(cmp["raters"].size() == 3);
  REQUIRE(cmp["lines"].size() == 2);
  CHECK(cmp["lines"][0]["perAnnotator"]["ana"]["uptake"] == true);
  CHECK(cmp["lines"][0]["perAnnotator"]["ben"]["uptake"] == false);
  bool saw_line3 = false;
  for (const auto& d : cmp["disagreementCells"]) saw_line3 |= d["lineNumber"] == 3 && d["codeId"] == "uptake";
  CHECK(saw_line3);
  CHECK(body_of(ana->get(base + "/comparison?includeLlm=false"))["raters"].size() == 2);

  const auto first = ana->get(base + "/irr");
  const auto as_of = body_of(ana->get(base))["asOf"].get<std::uint64_t>();
  CHECK(ana->get(base + "/irr?asOf=" + std::to_string(as_of)).status == 304);
  CHECK(ana->get(base + "/utterances?asOf=" + std::to_string(as_of)).status == 304);
  ana->put_json(base + "/annotations/notes", R"([{"lineNumber":1,"text":"n"}])");
  CHECK(ana->get(base + "/irr?asOf=" + std::to_string(as_of)).status == 200);
  CHECK(body_of(ana->get(base))["asOf"].get<std::uint64_t>() > as_of);
  (void)first;
}

TEST_CASE("llm runs") {
  fixtures::LiveServer live;
  const auto p = setup(live);
  const auto base = "/api/projects/" + p.id;
  auto admin = live.admin();

  const auto preview = admin->post_json(
      base + "/llm-runs/preview",
      R"({"providerId":"mock","model":"m1","features":["uptake"],"lineRange":{"start":2,"end":3},"promptTemplate":"{{transcript}} {{bogus}}"})");
  REQUIRE(preview.status == 200);
  CHECK(body_of(preview)["prompt"].get<std::string>().starts_with("L2 Student: It doubles.\nL3 Teacher:"));
  CHECK(body_of(preview)["warnings"].size() == 1);

  const auto bad = admin->post_json(base + "/llm-runs", R"({"providerId":"mock","model":"m1","features":["memo"],"lineRange":{"start":1,"end":2}})");
  CHECK(bad.status == 422);
  CHECK(error_code(bad) == "invalidConfig");
  CHECK(admin->post_json(base + "/llm-runs", R"({"providerId":"nope","model":"m1","features":["uptake"],"lineRange":{"start":1,"end":2}})").status == 422);

  const auto started = admin->post_json(
      base + "/llm-runs", R"({"providerId":"mock","model":"m1","features":["uptake","press"],"lineRange":{"start":1,"end":2}})");
  REQUIRE(started.status == 202);
  const std::string run_id = body_of(started)["runId"];
  live.server.runs().wait_idle();
  const auto run = body_of(admin->get(base + "/llm-runs/" + run_id));
  CHECK(run["status"] == "complete");
  CHECK(run["cells"].size() == 4);
  CHECK(body_of(admin->get(base + "/llm-runs"))["runs"].size() == 1);
  CHECK(admin->get(base + "/llm-runs/run-none").status == 404);

  const auto cmp = body_of(admin->get(base + "/comparison?to=2"));
  CHECK(cmp["lines"][0]["perAnnotator"]["llm:mock:m1"].size() == 2);

  const auto failed_start = admin->post_json(
      base + "/llm-runs", R"({"providerId":"mock","model":"prose","features":["uptake"],"lineRange":{"start":1,"end":1},"maxRetries":0})");
  REQUIRE(failed_start.status == 202);
  live.server.runs().wait_idle();
  const auto failed = body_of(admin->get(base + "/llm-runs/" + body_of(failed_start)["runId"].get<std::string>()));
  CHECK(failed["status"] == "failed");
  CHECK(failed["errorCode"] == "responseUnparseable");
}

TEST_CASE("concurrent duplicate run is rejected") {
  fixtures::LiveServer live;
  const auto p = setup(live);
  std::atomic<bool> release{false};
  live.providers.bind("slow", [&](const llm::ProviderRequest&) {
    while (!release) std::this_thread::sleep_for(std::chrono::milliseconds(5));
    return std::string("[]");
  });
  const auto base = "/api/projects/" + p.id;
  const std::string cfg = R"({"providerId":"slow","model":"m","features":["uptake"],"lineRange":{"start":1,"end":1}})";
  auto admin = live.admin();
  CHECK(admin->post_json(base + "/llm-runs", cfg).status == 202);
  const auto second = admin->post_json(base + "/llm-runs", cfg);
  CHECK(second.status == 409);
  CHECK(error_code(second) == "runAlreadyActive");
  release = true;
  live.server.runs().wait_idle();
  CHECK(admin->post_json(base + "/llm-runs", cfg).status == 202);
  live.server.runs().wait_idle();
}

TEST_CASE("export and import") {
  fixtures::LiveServer live;
  const auto p = setup(live);
  const auto base = "/api/projects/" + p.id;
  auto admin = live.admin();
  live.client(p.ana_token)->put_json(base + "/annotations/cells", cells_body("ana", {{2, "press", true}}));

  const auto csv = admin->get(base + "/export?format=csv");
  REQUIRE(csv.status == 200);
  CHECK(csv.body.starts_with("line,speaker,text,segment,annotator,code,value,rationale,note,flag,updated_at\r\n2,Student"));
  CHECK(admin->get(base + "/export?format=xml").status == 400);

  const auto bundle = admin->get(base + "/export");
  REQUIRE(bundle.status == 200);
  CHECK(bundle.body.starts_with("{\n  \"schemaVersion\": 1"));
  const auto imported = admin->post_json("/api/projects/import", bundle.body);
  REQUIRE(imported.status == 201);
  const std::string copy = body_of(imported)["id"];
  CHECK(copy != p.id);
  CHECK(admin->get("/api/projects/" + copy + "/export?format=csv").body == csv.body);

  const auto multipart = admin->post_form("/api/projects/import", {file_part(bundle.body, "b.json", "application/json")});
  CHECK(multipart.status == 201);

  auto broken = Json::parse(bundle.body);
  broken["schemaVersion"] = 99;
  const auto rejected = admin->post_json("/api/projects/import", broken.dump());
  CHECK(rejected.status == 422);
  CHECK(error_code(rejected) == "schemaVersionUnsupported");
}
