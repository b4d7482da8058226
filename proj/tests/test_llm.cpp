#include "doctest.h"

#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>

#include "builders.hpp"

#include "educoder/core/error.hpp"
#include "educoder/llm/prompt.hpp"
#include "educoder/llm/provider.hpp"
#include "educoder/llm/response.hpp"
#include "educoder/llm/runner.hpp"

using namespace educoder;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

core::Project sample_project() {
  core::Project p;
  p.id = "p-test";
  p.name = "sample";
  p.codebook = fixtures::codebook({{"Uptake", "Teacher builds on a student idea.", "", "binary"},
                                   {"Revoicing", "Teacher restates a student contribution.", "", "binary"},
                                   {"Comment", "Free text.", "", "free_text"}});
  p.codebook->codes[0].examples = {"So you're saying the ratio doubles?"};
  p.codebook->codes[0].non_examples = {"Okay."};
  p.transcript = fixtures::transcript({{"Teacher", "What do you notice about the pattern?", ""},
                                       {"Student", "It goes up by three each time.", ""},
                                       {"Teacher", "So it grows by three, why do you think so?", ""}});
  return p;
}

llm::LlmRunConfig config(std::string model, int start = 1, int end = 3) {
  llm::LlmRunConfig c;
  c.provider_id = "mock";
  c.model = std::move(model);
  c.features = {"uptake", "revoicing"};
  c.line_range = {start, end};
  return c;
}

llm::Provider mock() { return llm::make_mock_provider(EDUCODER_TEST_FIXTURES "/mock"); }

}  // namespace

TEST_CASE("default prompt matches the golden file") {
  const auto p = sample_project();
  const auto built = llm::build_prompt(config("m"), *p.codebook, *p.transcript, p.materials);
  CHECK(built.warnings.empty());
  CHECK(built.text == slurp(EDUCODER_TEST_GOLDEN "/default_prompt.txt"));
}

TEST_CASE("prompt placeholders") {
  const auto p = sample_project();
  auto c = config("m", 2, 3);
  c.prompt_template = "{{transcript}}";
  const auto built = llm::build_prompt(c, *p.codebook, *p.transcript, p.materials);
  CHECK(built.text ==
        "L2 Student: It goes up by three each time.\nL3 Teacher: So it grows by three, why do you think so?" +
            llm::output_contract(c));

  c.prompt_template = "Look at {{bogus}} and {{features}}";
  const auto odd = llm::build_prompt(c, *p.codebook, *p.transcript, p.materials);
  CHECK(odd.text.starts_with("Look at {{bogus}} and uptake, revoicing"));
  REQUIRE(odd.warnings.size() == 1);
  CHECK(odd.warnings[0].find("bogus") != std::string::npos);

  c.line_range = {7, 9};
  try {
    (void)llm::build_prompt(c, *p.codebook, *p.transcript, p.materials);
    FAIL("expected emptyLineRangeSelection");
  } catch (const Error& e) {
    CHECK(e.code() == errc::empty_line_range_selection);
  }
}

TEST_CASE("context materials in the prompt") {
  auto p = sample_project();
  p.materials = {{"m-1", core::AttachmentKind::instructions, "Lesson plan", "text/plain", "Fractions day."},
                 {"m-2", core::AttachmentKind::image, "Board", "image/png", "\x89PNG"}};
  auto c = config("m");
  c.prompt_template = "{{instructions}}";
  CHECK(llm::build_prompt(c, *p.codebook, *p.transcript, p.materials).text.starts_with("(none)"));
  c.include_context_materials = true;
  const auto text = llm::build_prompt(c, *p.codebook, *p.transcript, p.materials).text;
  CHECK(text.starts_with("## Lesson plan\nFractions day.\n\n[image not shown: Board]"));
}

TEST_CASE("config validation") {
  const auto p = sample_project();
  auto check = [&](llm::LlmRunConfig c, std::string_view field) {
    try {
      llm::validate_config(c, *p.codebook, *p.transcript);
      FAIL("expected invalidConfig");
    } catch (const Error& e) {
      CHECK(e.code() == errc::invalid_config);
      CHECK(e.field() == field);
    }
  };
  auto c = config("m");
  c.features = {};
  check(c, "features");
  c.features = {"comment"};
  check(c, "features");
  c.features = {"nope"};
  check(c, "features");
  c = config("m", 3, 2);
  check(c, "lineRange");
  c = config("m");
  c.temperature = -1;
  check(c, "temperature");
  CHECK(llm::llm_annotator_id(config("gpt-4o")) == "llm:mock:gpt-4o");
}

TEST_CASE("parse replies") {
  const auto c = config("m", 1, 2);
  const std::string bare = R"([{"line":1,"code":"uptake","present":true,"rationale":"builds on idea"}])";
  const auto one = llm::parse_llm_response(bare, c);
  REQUIRE(one.cells.size() == 1);
  CHECK(one.cells[0].line == 1);
  CHECK(one.cells[0].code_id == "uptake");
  CHECK(one.cells[0].value == core::CellValue{true});
  CHECK(one.cells[0].rationale == "builds on idea");
  CHECK(one.warnings.empty());

  const auto fenced = llm::parse_llm_response("Here you go:\n```json\n" + bare + "\n```", c);
  CHECK(fenced.cells == one.cells);
  CHECK(llm::parse_llm_response("See [1] and [note], then " + bare + " done.", c).cells == one.cells);

  const auto scoped = llm::parse_llm_response(
      R"([{"line":99,"code":"uptake","present":true},{"line":2,"code":"revoicing","present":false}])", c);
  CHECK(scoped.cells.size() == 1);
  CHECK(scoped.warnings.size() == 1);

  const auto dup = llm::parse_llm_response(
      R"([{"line":1,"code":"uptake","present":true},{"line":1,"code":"uptake","present":false}])", c);
  REQUIRE(dup.cells.size() == 1);
  CHECK(dup.cells[0].value == core::CellValue{false});
  CHECK(dup.warnings.size() == 1);

  const auto junk = llm::parse_llm_response(
      R"([1,{"line":"1","code":"uptake","present":true},{"line":1,"code":"comment","present":true},{"line":1,"code":"uptake","present":"yes"}])",
      c);
  CHECK(junk.cells.empty());
  CHECK(junk.warnings.size() == 4);

  CHECK(llm::parse_llm_response("[]", c).cells.empty());
  for (const char* raw : {"", "no array here", "[1, 2, 3]", "[{broken", "```json\n{\"line\":1}\n```"}) {
    try {
      (void)llm::parse_llm_response(raw, c);
      FAIL("expected noJsonArrayFound for: " << raw);
    } catch (const Error& e) {
      CHECK(e.code() == errc::no_json_array_found);
    }
  }
}

TEST_CASE("parsed cells never leave the configured scope") {
  std::mt19937 rng(99);
  const std::vector<std::string> codes{"uptake", "revoicing", "comment", "other", ""};
  for (int i = 0; i < 300; ++i) {
    auto c = config("m", std::uniform_int_distribution<int>(1, 4)(rng), 0);
    c.line_range.end = c.line_range.start + std::uniform_int_distribution<int>(0, 3)(rng);
    c.features = {codes[static_cast<std::size_t>(std::uniform_int_distribution<int>(0, 1)(rng))]};
    std::string raw = i % 3 ? "prefix [see 2] " : "";
    raw += "[";
    const int n = std::uniform_int_distribution<int>(0, 8)(rng);
    for (int k = 0; k < n; ++k) {
      if (k) raw += ",";
      raw += R"({"line":)" + std::to_string(std::uniform_int_distribution<int>(-1, 9)(rng)) + R"(,"code":")" +
             codes[static_cast<std::size_t>(std::uniform_int_distribution<int>(0, 4)(rng))] + R"(","present":)" +
             (k % 4 == 3 ? "null" : "true") + "}";
    }
    raw += "] trailing ]";
    try {
      for (const auto& cell : llm::parse_llm_response(raw, c).cells) {
        CHECK(cell.line >= c.line_range.start);
        CHECK(cell.line <= c.line_range.end);
        CHECK(cell.code_id == c.features[0]);
      }
    } catch (const Error& e) {
      CHECK(e.code() == errc::no_json_array_found);
    }
  }
}

TEST_CASE("run outcomes against the mock provider") {
  const auto p = sample_project();

  SUBCASE("complete and deterministic") {
    const auto a = llm::run_annotation(config("m1", 1, 2), p, mock(), "run-a");
    const auto b = llm::run_annotation(config("m1", 1, 2), p, mock(), "run-a");
    CHECK(a.status == llm::RunStatus::complete);
    CHECK(a.cells.size() == 4);
    CHECK(a.raw_response == b.raw_response);
    for (std::size_t i = 0; i < a.cells.size(); ++i) CHECK(a.cells[i].value == b.cells[i].value);
    for (const auto& cell : a.cells) CHECK(cell.annotator == "llm:mock:m1");
    CHECK(a.attempts == 1);
  }
  SUBCASE("prose on every attempt fails") {
    const auto r = llm::run_annotation(config("prose"), p, mock());
    CHECK(r.status == llm::RunStatus::failed);
    CHECK(r.error_code == std::string(errc::response_unparseable));
    CHECK(r.attempts == 3);
    CHECK(r.raw_response.starts_with("I looked at the lines"));
    CHECK(r.cells.empty());
  }
  SUBCASE("partial names the missing pair") {
    const auto r = llm::run_annotation(config("partial", 1, 2), p, mock());
    CHECK(r.status == llm::RunStatus::partial);
    CHECK(r.cells.size() == 3);
    REQUIRE(r.warnings.size() == 1);
    CHECK(r.warnings[0] == "missing: line 2, code \"revoicing\"");
  }
  SUBCASE("transport failure is retried with the same prompt") {
    const auto r = llm::run_annotation(config("flaky"), p, mock());
    CHECK(r.status == llm::RunStatus::complete);
    CHECK(r.attempts == 2);

    std::vector<std::string> prompts;
    const llm::Provider recorder = [&](const llm::ProviderRequest& req) -> std::string {
      prompts.push_back(req.prompt);
      throw llm::ProviderError(llm::ProviderError::Kind::transport, "connection refused");
    };
    auto c = config("x");
    c.max_retries = 4;
    const auto down = llm::run_annotation(c, p, recorder);
    CHECK(down.status == llm::RunStatus::failed);
    CHECK(down.error_code == std::string(errc::provider_unreachable));
    CHECK(prompts.size() == 5);
    for (const auto& s : prompts) CHECK(s == prompts.front());
  }
  SUBCASE("credential failure is not retried") {
    const auto r = llm::run_annotation(config("locked"), p, mock());
    CHECK(r.status == llm::RunStatus::failed);
    CHECK(r.error_code == std::string(errc::authentication_failed));
    CHECK(r.attempts == 1);
  }
  SUBCASE("no codebook") {
    auto bare = p;
    bare.codebook.reset();
    CHECK_THROWS_AS((void)llm::run_annotation(config("m"), bare, mock()), Error);
  }
}

TEST_CASE("provider registry and key names") {
  CHECK(llm::api_key_env_name("openai") == "EDUCODER_LLM_OPENAI_KEY");
  CHECK(llm::api_key_env_name("my-proxy.v2") == "EDUCODER_LLM_MY_PROXY_V2_KEY");
  llm::ProviderRegistry reg;
  CHECK(reg.knows("mock"));
  CHECK(reg.knows("openai"));
  CHECK(reg.knows("anthropic"));
  CHECK_FALSE(reg.knows("nope"));
  CHECK_THROWS_AS((void)reg.resolve("nope"), Error);
  reg.bind("canned", [](const llm::ProviderRequest&) { return std::string("[]"); });
  CHECK(reg.resolve("canned")(llm::ProviderRequest{"", config("m")}) == "[]");
}

TEST_CASE("hosted providers fail without a key and never leak it") {
  ::unsetenv("EDUCODER_LLM_TESTHOST_KEY");
  llm::LlmProviderBinding b{"testhost", "http://127.0.0.1:9/v1/chat/completions", "EDUCODER_LLM_TESTHOST_KEY", 1};
  const auto p = sample_project();
  auto c = config("m");
  c.provider_id = "testhost";
  c.max_retries = 0;
  const auto missing = llm::run_annotation(c, p, llm::make_chat_completions_provider(b));
  CHECK(missing.status == llm::RunStatus::failed);
  CHECK(missing.error_code == std::string(errc::authentication_failed));

  ::setenv("EDUCODER_LLM_TESTHOST_KEY", "sk-secret-value", 1);
  const auto down = llm::run_annotation(c, p, llm::make_messages_provider(b));
  CHECK(down.status == llm::RunStatus::failed);
  CHECK(down.error_code == std::string(errc::provider_unreachable));
  for (const auto& w : down.warnings) CHECK(w.find("sk-secret-value") == std::string::npos);
  CHECK(down.raw_response.find("sk-secret-value") == std::string::npos);
  ::unsetenv("EDUCODER_LLM_TESTHOST_KEY");
}
