#pragma once
// Random inputs for the property checks.

#include <algorithm>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "builders.hpp"

#include "educoder/ingest/filter.hpp"
#include "educoder/irr/statistics.hpp"
#include "educoder/llm/types.hpp"

namespace fixtures {

using educoder::irr::Label;

inline int pick(std::mt19937_64& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
inline bool coin(std::mt19937_64& rng, double p) { return std::bernoulli_distribution(p)(rng); }

inline std::vector<Label> random_labels(std::mt19937_64& rng, std::size_t n, double missing) {
  std::vector<Label> out(n);
  for (auto& l : out) l = coin(rng, missing) ? Label::missing : coin(rng, 0.5) ? Label::present : Label::absent;
  return out;
}

/// units x raters, at least `min_missing` of the entries missing.
inline std::vector<std::vector<Label>> random_label_matrix(std::mt19937_64& rng, int units, int raters,
                                                           double min_missing) {
  std::vector<std::vector<Label>> rows;
  for (int u = 0; u < units; ++u) rows.push_back(random_labels(rng, static_cast<std::size_t>(raters), min_missing));
  const int total = units * raters;
  auto missing = [&] {
    int m = 0;
    for (const auto& r : rows) m += static_cast<int>(std::count(r.begin(), r.end(), Label::missing));
    return m;
  };
  while (missing() < min_missing * total) {
    rows[static_cast<std::size_t>(pick(rng, 0, units - 1))][static_cast<std::size_t>(pick(rng, 0, raters - 1))] =
        Label::missing;
  }
  return rows;
}

struct FilterCase {
  educoder::core::Transcript transcript;
  educoder::ingest::UtteranceFilter filter;
};

inline FilterCase random_filter_case(std::mt19937_64& rng) {
  static const std::vector<std::string> words{"Ratio", "why", "HALF", "because", "pattern", "Équipe", "x", "doubles"};
  static const std::vector<std::string> speakers{"T", "S1", "S2", "s1"};
  static const std::vector<std::string> segments{"", "warmup", "launch", "Launch"};
  const int n = pick(rng, 1, 20);
  std::vector<std::vector<std::string>> rows;
  for (int i = 0; i < n; ++i) {
    std::string text;
    for (int w = pick(rng, 1, 4); w > 0; --w) text += words[static_cast<std::size_t>(pick(rng, 0, 7))] + " ";
    rows.push_back({speakers[static_cast<std::size_t>(pick(rng, 0, 3))], text,
                    segments[static_cast<std::size_t>(pick(rng, 0, 3))]});
  }
  FilterCase c{transcript(rows), {}};
  if (coin(rng, 0.5)) {
    std::string k = words[static_cast<std::size_t>(pick(rng, 0, 7))];
    k = k.substr(0, static_cast<std::size_t>(pick(rng, 1, static_cast<int>(k.size()))));
    for (auto& ch : k) {
      if (coin(rng, 0.5) && ch >= 'a' && ch <= 'z') ch = static_cast<char>(ch - 'a' + 'A');
    }
    c.filter.keyword = k;
  }
  if (coin(rng, 0.4)) {
    std::set<std::string> s;
    for (int k = pick(rng, 0, 2); k >= 0; --k) s.insert(speakers[static_cast<std::size_t>(pick(rng, 0, 3))]);
    c.filter.speakers = s;
  }
  if (coin(rng, 0.4)) c.filter.segment = segments[static_cast<std::size_t>(pick(rng, 0, 3))];
  if (coin(rng, 0.5)) {
    const int a = pick(rng, 1, n);
    c.filter.line_range = std::pair{a, pick(rng, a, n)};
  }
  return c;
}

/// A model reply mixing valid, out-of-scope, malformed and duplicate elements,
/// wrapped in prose or fences.
inline std::string random_llm_reply(std::mt19937_64& rng) {
  static const std::vector<std::string> codes{"uptake", "press", "memo", "UPTAKE", "", "other"};
  static const std::vector<std::string> presents{"true", "false", "\"yes\"", "null", "1"};
  std::string arr = "[";
  for (int k = pick(rng, 0, 12); k > 0; --k) {
    if (arr.size() > 1) arr += ",";
    switch (pick(rng, 0, 9)) {
      case 0: arr += "42"; break;
      case 1: arr += R"({"code":"uptake","present":true})"; break;
      case 2: arr += "[1,2]"; break;
      default:
        arr += R"({"line":)" + (coin(rng, 0.1) ? std::string("\"2\"") : std::to_string(pick(rng, -2, 12))) +
               R"(,"code":")" + codes[static_cast<std::size_t>(pick(rng, 0, 5))] + R"(","present":)" +
               presents[static_cast<std::size_t>(pick(rng, 0, 4))] + R"(,"rationale":"r"})";
    }
  }
  arr += "]";
  switch (pick(rng, 0, 4)) {
    case 0: return arr;
    case 1: return "Here you go:\n```json\n" + arr + "\n```\n";
    case 2: return "Notes [see 1] and [draft] first. " + arr + " Hope that helps [end]";
    case 3: return "```\n" + arr + "\n``` and a second try " + arr;
    default: return arr.substr(0, arr.size() / 2);
  }
}

inline educoder::llm::LlmRunConfig random_run_config(std::mt19937_64& rng) {
  educoder::llm::LlmRunConfig c;
  c.provider_id = "mock";
  c.model = "m";
  c.features = coin(rng, 0.5) ? std::vector<std::string>{"uptake"} : std::vector<std::string>{"uptake", "press"};
  c.line_range.start = pick(rng, 1, 8);
  c.line_range.end = pick(rng, c.line_range.start, 10);
  return c;
}

}  // namespace fixtures
