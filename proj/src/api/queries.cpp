#include "educoder/api/queries.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "educoder/core/error.hpp"
#include "educoder/core/slug.hpp"
#include "educoder/ingest/filter.hpp"

namespace educoder::api {

namespace {

std::vector<core::LineNumber> all_lines(const core::Transcript& t) {
  std::vector<core::LineNumber> lines(static_cast<std::size_t>(t.line_count()));
  for (std::size_t i = 0; i < lines.size(); ++i) lines[i] = static_cast<core::LineNumber>(i + 1);
  return lines;
}

std::vector<std::string> default_raters(const core::Project& p, bool include_llm) {
  std::vector<std::string> out;
  for (const auto& a : p.annotators) {
    if (a.kind == core::RaterKind::human || include_llm) out.push_back(a.id);
  }
  return out;
}

}  // namespace

std::vector<std::string> split_list(std::string_view text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find(',', start);
    if (end == std::string_view::npos) end = text.size();
    auto item = core::trim(text.substr(start, end - start));
    if (!item.empty()) out.emplace_back(item);
    start = end + 1;
  }
  return out;
}

irr::AgreementReport irr_report(const store::Snapshot& snapshot, const IrrQuery& query) {
  const auto& p = *snapshot.project;

  std::vector<std::string> raters;
  if (query.raters) {
    for (const auto& r : *query.raters) {
      if (p.find_annotator(r) == nullptr) throw Error(errc::validation, "unknown rater " + r, "raters");
      if (std::find(raters.begin(), raters.end(), r) == raters.end()) raters.push_back(r);
    }
  } else {
    raters = default_raters(p, query.include_llm);
  }

  core::Codebook codes;
  if (query.codes) {
    std::set<std::string> wanted;
    for (const auto& c : *query.codes) {
      const auto* def = p.codebook ? p.codebook->find(c) : nullptr;
      if (def == nullptr) throw Error(errc::validation, "unknown code " + c, "codes");
      if (def->value_kind != core::ValueKind::binary) {
        throw Error(errc::validation, "code " + c + " is free text and has no agreement", "codes");
      }
      wanted.insert(c);
    }
    for (const auto& def : p.codebook->codes) {
      if (wanted.contains(def.code_id)) codes.codes.push_back(def);
    }
  } else if (p.codebook) {
    codes = *p.codebook;
  }

  const auto lines = p.transcript ? all_lines(*p.transcript) : std::vector<core::LineNumber>{};
  const auto matrix = irr::build_rating_matrix(snapshot.cells, codes, raters, lines);
  return irr::compute_agreement_report(matrix, p.settings, &codes);
}

codec::Json irr_report_json(const store::Snapshot& snapshot, const IrrQuery& query) {
  return codec::encode(irr_report(snapshot, query));
}

codec::Json comparison_json(const store::Snapshot& snapshot, const ComparisonQuery& query) {
  using codec::Json;
  const auto& p = *snapshot.project;
  Json out;
  Json lines_json = Json::array();
  Json disagreements = Json::array();
  if (!p.transcript) {
    if (query.range) throw Error(errc::line_range_out_of_bounds, "project has no transcript", "from");
    out["raters"] = Json::array();
    out["lines"] = std::move(lines_json);
    out["disagreementCells"] = std::move(disagreements);
    return out;
  }
  const auto& t = *p.transcript;
  ingest::UtteranceFilter filter;
  filter.line_range = query.range;
  const auto lines = ingest::apply_filter(t, filter);
  const auto raters = default_raters(p, query.include_llm);
  const std::set<std::string> rater_set(raters.begin(), raters.end());

  std::map<core::LineNumber, std::map<std::string, Json>> grid;
  for (const auto& c : snapshot.cells) {
    if (!rater_set.contains(c.annotator)) continue;
    auto& by_code = grid[c.line][c.annotator];
    if (by_code.is_null()) by_code = Json::object();
    by_code[c.code_id] = codec::encode(c.value);
  }
  std::map<core::LineNumber, Json> notes;
  for (const auto& n : snapshot.notes) {
    if (!rater_set.contains(n.annotator)) continue;
    auto& j = notes[n.line];
    if (j.is_null()) j = Json::object();
    j[n.annotator] = n.text;
  }
  std::map<core::LineNumber, std::vector<std::string>> flags;
  for (const auto& f : snapshot.flags) {
    if (f.active && rater_set.contains(f.annotator)) flags[f.line].push_back(f.annotator);
  }

  for (auto line : lines) {
    const auto& u = t.at_line(line);
    Json l;
    l["lineNumber"] = line;
    l["speaker"] = u.speaker;
    l["text"] = u.text;
    l["segment"] = u.segment ? Json(*u.segment) : Json(nullptr);
    Json per = Json::object();
    if (auto it = grid.find(line); it != grid.end()) {
      for (const auto& r : raters) {
        if (auto c = it->second.find(r); c != it->second.end()) per[r] = c->second;
      }
    }
    l["perAnnotator"] = std::move(per);
    auto n = notes.find(line);
    l["notes"] = n == notes.end() ? Json::object() : n->second;
    auto f = flags.find(line);
    l["flags"] = f == flags.end() ? Json::array() : Json(f->second);
    lines_json.push_back(std::move(l));
  }

  if (p.codebook) {
    const auto matrix = irr::build_rating_matrix(snapshot.cells, *p.codebook, raters, lines);
    for (const auto& d : irr::compute_agreement_report(matrix, p.settings).disagreements) {
      disagreements.push_back({{"lineNumber", d.line}, {"codeId", d.code_id}});
    }
  }
  out["raters"] = raters;
  out["lines"] = std::move(lines_json);
  out["disagreementCells"] = std::move(disagreements);
  return out;
}

codec::Json project_json(const store::Snapshot& snapshot) {
  using codec::Json;
  const auto& p = *snapshot.project;
  Json j;
  j["id"] = p.id;
  j["name"] = p.name;
  j["asOf"] = snapshot.as_of;
  j["settings"] = codec::encode(p.settings);
  Json annotators = Json::array();
  for (const auto& a : p.annotators) annotators.push_back(codec::encode(a));
  j["annotators"] = std::move(annotators);
  j["codebookVersion"] = snapshot.codebook_version;
  j["codebook"] = p.codebook ? codec::encode(*p.codebook) : Json(nullptr);
  j["transcriptVersion"] = snapshot.transcript_version;
  if (p.transcript) {
    Json t;
    t["lineCount"] = p.transcript->line_count();
    t["sourceColumns"] = p.transcript->source_columns;
    t["mapping"] = codec::encode(p.transcript->mapping);
    Json segments = Json::array();
    for (const auto& s : p.transcript->segments) {
      segments.push_back({{"label", s.label}, {"startLine", s.start_line}, {"endLine", s.end_line}});
    }
    t["segments"] = std::move(segments);
    j["transcript"] = std::move(t);
  } else {
    j["transcript"] = nullptr;
  }
  Json materials = Json::array();
  for (const auto& m : p.materials) materials.push_back(codec::encode(m, false));
  j["materials"] = std::move(materials);
  Json runs = Json::array();
  for (const auto& r : snapshot.runs) runs.push_back(codec::encode(r, false));
  j["llmRuns"] = std::move(runs);
  return j;
}

}  // namespace educoder::api
