#pragma once
// Small fixtures and a random project generator shared by the unit and
// acceptance tests.

#include <random>
#include <string>
#include <vector>

#include "educoder/core/model.hpp"
#include "educoder/ingest/codebook.hpp"
#include "educoder/ingest/table.hpp"
#include "educoder/ingest/transcript.hpp"
#include "educoder/llm/runner.hpp"
#include "educoder/store/store.hpp"

namespace fixtures {

namespace ec = educoder;

inline std::string csv(const std::vector<std::vector<std::string>>& rows) {
  std::string out;
  for (const auto& r : rows) ec::ingest::append_csv_record(out, r);
  return out;
}

/// Lines given as {speaker, text, segment}.
inline ec::core::Transcript transcript(const std::vector<std::vector<std::string>>& lines) {
  std::vector<std::vector<std::string>> rows{{"Speaker", "Text", "Segment"}};
  rows.insert(rows.end(), lines.begin(), lines.end());
  return ec::ingest::parse_transcript(csv(rows), ec::ingest::FileFormat::csv);
}

/// Codes given as {name, definition, category, value_kind}.
inline ec::core::Codebook codebook(const std::vector<std::vector<std::string>>& codes) {
  std::vector<std::vector<std::string>> rows{{"code", "definition", "category", "value_kind"}};
  rows.insert(rows.end(), codes.begin(), codes.end());
  return ec::ingest::parse_codebook(csv(rows), ec::ingest::FileFormat::csv);
}

inline ec::core::AnnotationCell cell(std::string annotator, int line, std::string code, ec::core::CellValue value) {
  ec::core::AnnotationCell c;
  c.annotator = std::move(annotator);
  c.line = line;
  c.code_id = std::move(code);
  c.value = std::move(value);
  return c;
}

class RandomProject {
 public:
  explicit RandomProject(std::uint64_t seed) : rng_(seed) {}

  int uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  bool chance(double p) { return std::bernoulli_distribution(p)(rng_); }

  std::string text() {
    static const std::vector<std::string> words = {
        "ratio", "why", "because", "Ok,", "\"quoted\"", "line\nbreak", "équipe", "x=3;", "  padded ", "fraction",
        "so", "what", "do", "you", "think?", "tab\there", "50%", "<b>", "a,b", "end."};
    std::string s;
    const int n = uniform(1, 6);
    for (int i = 0; i < n; ++i) {
      if (i) s += ' ';
      s += words[static_cast<std::size_t>(uniform(0, static_cast<int>(words.size()) - 1))];
    }
    return s;
  }

  /// Fills a fresh project in `store` and returns its id.
  std::string build(ec::store::Store& store) {
    const auto id = store.create_project("project " + std::to_string(uniform(1, 100000)));

    const int lines = uniform(1, 12);
    std::vector<std::vector<std::string>> rows;
    const std::vector<std::string> segments{"", "warmup", "launch", "discuss"};
    for (int i = 0; i < lines; ++i) {
      rows.push_back({"S" + std::to_string(uniform(1, 3)), text(), segments[static_cast<std::size_t>(uniform(0, 3))]});
    }
    store.replace_transcript(id, transcript(rows));

    std::vector<std::vector<std::string>> codes;
    const int n_codes = uniform(1, 5);
    const std::vector<std::string> categories{"", "Teacher moves", "Student moves"};
    for (int i = 0; i < n_codes; ++i) {
      codes.push_back({"Code " + std::to_string(i) + (chance(0.3) ? "?" : ""), text(),
                       categories[static_cast<std::size_t>(uniform(0, 2))], chance(0.8) ? "binary" : "free_text"});
    }
    store.replace_codebook(id, codebook(codes));
    const auto snap = store.snapshot(id);
    const auto& cb = *snap->project->codebook;

    std::vector<std::string> raters;
    const int n_raters = uniform(1, 3);
    for (int i = 0; i < n_raters; ++i) {
      raters.push_back("coder" + std::to_string(i + 1));
      store.add_annotator(id, {raters.back(), ec::core::RaterKind::human, "Coder " + std::to_string(i + 1)});
    }
    if (chance(0.3)) {
      raters.push_back("llm:mock:m1");
      store.add_annotator(id, {raters.back(), ec::core::RaterKind::llm, "mock/m1"});
      ec::llm::LlmRunResult run;
      run.run_id = "run-" + std::to_string(uniform(1000, 9999));
      run.config.provider_id = "mock";
      run.config.model = "m1";
      run.config.features = {cb.codes.front().code_id};
      run.config.line_range = {1, lines};
      run.status = ec::llm::RunStatus::complete;
      run.raw_response = "[]";
      run.attempts = 1;
      run.created_at = ec::now_utc();
      store.save_run(id, run);
    }
    if (chance(0.3)) {
      store.add_material(id, {"", ec::core::AttachmentKind::instructions, "Task", "text/plain", text()});
    }

    for (const auto& r : raters) {
      for (int line = 1; line <= lines; ++line) {
        for (const auto& code : cb.codes) {
          if (!chance(0.6)) continue;
          ec::core::CellValue v;
          if (code.value_kind == ec::core::ValueKind::free_text) {
            v = text();
          } else {
            const int k = uniform(0, 4);
            if (k == 0) v = std::monostate{};
            else v = k % 2 == 0;
          }
          auto c = cell(r, line, code.code_id, v);
          if (chance(0.2)) c.rationale = text();
          store.upsert_cell(id, c);
        }
        if (ec::core::rater_kind_of(r) == ec::core::RaterKind::human) {
          if (chance(0.2)) store.set_note(id, {r, line, text(), {}});
          if (chance(0.15)) store.toggle_flag(id, {r, line, chance(0.5) ? std::optional(text()) : std::nullopt, true, {}});
        }
      }
    }
    return id;
  }

 private:
  std::mt19937_64 rng_;
};

}  // namespace fixtures
