#include "educoder/codec/json_codec.hpp"

#include <algorithm>
#include <tuple>

#include "educoder/codec/base64.hpp"
#include "educoder/core/error.hpp"

namespace educoder::codec {

namespace {

const Json& field(const Json& j, const char* name) {
  if (!j.is_object()) throw Error(errc::validation, "expected an object", name);
  auto it = j.find(name);
  if (it == j.end()) throw Error(errc::validation, std::string("missing field \"") + name + "\"", name);
  return *it;
}

std::string str(const Json& j, const char* name) {
  const Json& v = field(j, name);
  if (!v.is_string()) throw Error(errc::validation, std::string("field \"") + name + "\" must be a string", name);
  return v.get<std::string>();
}

std::optional<std::string> opt_str(const Json& j, const char* name) {
  auto it = j.find(name);
  if (it == j.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) throw Error(errc::validation, std::string("field \"") + name + "\" must be a string", name);
  return it->get<std::string>();
}

long long integer(const Json& j, const char* name) {
  const Json& v = field(j, name);
  if (!v.is_number_integer()) throw Error(errc::validation, std::string("field \"") + name + "\" must be an integer", name);
  return v.get<long long>();
}

std::vector<std::string> str_list(const Json& j, const char* name) {
  auto it = j.find(name);
  if (it == j.end() || it->is_null()) return {};
  if (!it->is_array()) throw Error(errc::validation, std::string("field \"") + name + "\" must be an array", name);
  std::vector<std::string> out;
  for (const auto& e : *it) {
    if (!e.is_string()) throw Error(errc::validation, std::string("field \"") + name + "\" must hold strings", name);
    out.push_back(e.get<std::string>());
  }
  return out;
}

const Json& array_field(const Json& j, const char* name) {
  const Json& v = field(j, name);
  if (!v.is_array()) throw Error(errc::validation, std::string("field \"") + name + "\" must be an array", name);
  return v;
}

}  // namespace

Json encode(const core::CellValue& v) {
  if (std::holds_alternative<bool>(v)) return std::get<bool>(v);
  if (std::holds_alternative<std::string>(v)) return std::get<std::string>(v);
  return nullptr;
}

core::CellValue decode_cell_value(const Json& j) {
  if (j.is_null()) return std::monostate{};
  if (j.is_boolean()) return j.get<bool>();
  if (j.is_string()) return j.get<std::string>();
  throw Error(errc::value_type_mismatch, "cell value must be true, false, null or a string", "value");
}

Json encode(const core::ProjectSettings& s) {
  Json j;
  j["lowAgreementThreshold"] = s.low_agreement_threshold;
  j["irrPoolingMode"] = core::to_string(s.pooling);
  return j;
}

core::ProjectSettings decode_settings(const Json& j) {
  core::ProjectSettings s;
  if (!j.is_object()) throw Error(errc::validation, "settings must be an object", "settings");
  if (auto it = j.find("lowAgreementThreshold"); it != j.end()) {
    if (!it->is_number()) throw Error(errc::validation, "lowAgreementThreshold must be a number", "lowAgreementThreshold");
    s.low_agreement_threshold = it->get<double>();
  }
  if (auto p = opt_str(j, "irrPoolingMode")) s.pooling = core::pooling_mode_from_string(*p);
  core::validate_settings(s);
  return s;
}

Json encode(const core::Annotator& a) {
  Json j;
  j["id"] = a.id;
  j["kind"] = core::to_string(a.kind);
  j["displayName"] = a.display_name;
  return j;
}

core::Annotator decode_annotator(const Json& j) {
  core::Annotator a;
  a.id = str(j, "id");
  if (a.id.empty()) throw Error(errc::validation, "annotator id is empty", "id");
  a.kind = core::rater_kind_of(a.id);
  if (auto k = opt_str(j, "kind"); k && core::rater_kind_from_string(*k) != a.kind) {
    throw Error(errc::validation, "annotator kind disagrees with the llm: id prefix", "kind");
  }
  a.display_name = opt_str(j, "displayName").value_or(a.id);
  return a;
}

Json encode(const core::ColumnMapping& m) {
  Json j;
  j["speakerColumn"] = m.speaker_column;
  j["textColumn"] = m.text_column;
  j["segmentColumn"] = m.segment_column ? Json(*m.segment_column) : Json(nullptr);
  j["timestampColumn"] = m.timestamp_column ? Json(*m.timestamp_column) : Json(nullptr);
  j["extraColumns"] = m.extra_columns;
  return j;
}

core::ColumnMapping decode_mapping(const Json& j) {
  core::ColumnMapping m;
  m.speaker_column = str(j, "speakerColumn");
  m.text_column = str(j, "textColumn");
  m.segment_column = opt_str(j, "segmentColumn");
  m.timestamp_column = opt_str(j, "timestampColumn");
  m.extra_columns = str_list(j, "extraColumns");
  return m;
}

Json encode(const core::CodeDefinition& c) {
  Json j;
  j["codeId"] = c.code_id;
  j["name"] = c.name;
  j["definition"] = c.definition;
  j["category"] = c.category ? Json(*c.category) : Json(nullptr);
  j["examples"] = c.examples;
  j["nonExamples"] = c.non_examples;
  j["valueKind"] = core::to_string(c.value_kind);
  return j;
}

core::CodeDefinition decode_code(const Json& j) {
  core::CodeDefinition c;
  c.code_id = str(j, "codeId");
  c.name = str(j, "name");
  c.definition = str(j, "definition");
  c.category = opt_str(j, "category");
  c.examples = str_list(j, "examples");
  c.non_examples = str_list(j, "nonExamples");
  c.value_kind = core::value_kind_from_string(opt_str(j, "valueKind").value_or("binary"));
  return c;
}

Json encode(const core::Codebook& c) {
  Json j = Json::array();
  for (const auto& code : c.codes) j.push_back(encode(code));
  return j;
}

core::Codebook decode_codebook(const Json& j) {
  if (!j.is_array()) throw Error(errc::validation, "codebook must be an array", "codebook");
  core::Codebook book;
  for (const auto& e : j) book.codes.push_back(decode_code(e));
  return book;
}

Json encode(const core::Utterance& u) {
  Json j;
  j["lineNumber"] = u.line;
  j["speaker"] = u.speaker;
  j["text"] = u.text;
  j["segment"] = u.segment ? Json(*u.segment) : Json(nullptr);
  j["timestamp"] = u.timestamp ? Json(*u.timestamp) : Json(nullptr);
  Json extras = Json::array();
  for (const auto& [k, v] : u.extras) extras.push_back(Json::array({k, v}));
  j["extras"] = std::move(extras);
  return j;
}

core::Utterance decode_utterance(const Json& j) {
  core::Utterance u;
  u.line = static_cast<core::LineNumber>(integer(j, "lineNumber"));
  u.speaker = str(j, "speaker");
  u.text = str(j, "text");
  u.segment = opt_str(j, "segment");
  u.timestamp = opt_str(j, "timestamp");
  if (auto it = j.find("extras"); it != j.end()) {
    for (const auto& pair : *it) {
      if (!pair.is_array() || pair.size() != 2 || !pair[0].is_string() || !pair[1].is_string()) {
        throw Error(errc::validation, "extras entries must be [column, value] pairs", "extras");
      }
      u.extras.emplace_back(pair[0].get<std::string>(), pair[1].get<std::string>());
    }
  }
  return u;
}

Json encode(const core::Transcript& t) {
  Json j;
  j["sourceColumns"] = t.source_columns;
  j["mapping"] = encode(t.mapping);
  Json rows = Json::array();
  for (const auto& u : t.utterances) rows.push_back(encode(u));
  j["rows"] = std::move(rows);
  return j;
}

core::Transcript decode_transcript(const Json& j) {
  core::Transcript t;
  t.source_columns = str_list(j, "sourceColumns");
  t.mapping = decode_mapping(field(j, "mapping"));
  for (const auto& row : array_field(j, "rows")) t.utterances.push_back(decode_utterance(row));
  for (std::size_t i = 0; i < t.utterances.size(); ++i) {
    if (t.utterances[i].line != static_cast<core::LineNumber>(i + 1)) {
      throw Error(errc::validation, "transcript line numbers must run 1..N without gaps", "rows");
    }
    if (t.utterances[i].speaker.empty()) throw Error(errc::empty_speaker, "utterance has an empty speaker", "speaker");
  }
  t.segments = core::derive_segments(t.utterances);
  return t;
}

Json encode(const core::Attachment& a, bool with_bytes) {
  Json j;
  j["id"] = a.id;
  j["kind"] = core::to_string(a.kind);
  j["title"] = a.title;
  j["mediaType"] = a.media_type;
  j["size"] = a.bytes.size();
  if (with_bytes) j["bytesBase64"] = base64_encode(a.bytes);
  return j;
}

core::Attachment decode_attachment(const Json& j) {
  core::Attachment a;
  a.id = str(j, "id");
  a.kind = core::attachment_kind_from_string(str(j, "kind"));
  a.title = str(j, "title");
  a.media_type = str(j, "mediaType");
  a.bytes = base64_decode(str(j, "bytesBase64"));
  if (a.bytes.empty() || a.media_type.empty()) {
    throw Error(errc::validation, "attachment needs non-empty bytes and media type", "bytesBase64");
  }
  return a;
}

Json encode(const core::AnnotationCell& c, bool with_revision) {
  Json j;
  j["annotator"] = c.annotator;
  j["lineNumber"] = c.line;
  j["codeId"] = c.code_id;
  j["value"] = encode(c.value);
  if (c.rationale) j["rationale"] = *c.rationale;
  j["updatedAt"] = to_iso8601(c.updated_at);
  if (with_revision) j["revision"] = c.revision;
  return j;
}

core::AnnotationCell decode_cell(const Json& j) {
  core::AnnotationCell c;
  c.annotator = str(j, "annotator");
  c.line = static_cast<core::LineNumber>(integer(j, "lineNumber"));
  c.code_id = str(j, "codeId");
  c.value = j.contains("value") ? decode_cell_value(j.at("value")) : core::CellValue{};
  c.rationale = opt_str(j, "rationale");
  if (auto ts = opt_str(j, "updatedAt")) c.updated_at = parse_iso8601(*ts);
  if (auto it = j.find("revision"); it != j.end() && it->is_number_integer()) c.revision = it->get<std::int64_t>();
  return c;
}

Json encode(const core::NoteEntry& n) {
  Json j;
  j["annotator"] = n.annotator;
  j["lineNumber"] = n.line;
  j["text"] = n.text;
  j["updatedAt"] = to_iso8601(n.updated_at);
  return j;
}

core::NoteEntry decode_note(const Json& j) {
  core::NoteEntry n;
  n.annotator = str(j, "annotator");
  n.line = static_cast<core::LineNumber>(integer(j, "lineNumber"));
  n.text = str(j, "text");
  if (auto ts = opt_str(j, "updatedAt")) n.updated_at = parse_iso8601(*ts);
  return n;
}

Json encode(const core::Flag& f) {
  Json j;
  j["annotator"] = f.annotator;
  j["lineNumber"] = f.line;
  j["reason"] = f.reason ? Json(*f.reason) : Json(nullptr);
  j["active"] = f.active;
  j["updatedAt"] = to_iso8601(f.updated_at);
  return j;
}

core::Flag decode_flag(const Json& j) {
  core::Flag f;
  f.annotator = str(j, "annotator");
  f.line = static_cast<core::LineNumber>(integer(j, "lineNumber"));
  f.reason = opt_str(j, "reason");
  if (auto it = j.find("active"); it != j.end()) {
    if (!it->is_boolean()) throw Error(errc::validation, "active must be a boolean", "active");
    f.active = it->get<bool>();
  }
  if (auto ts = opt_str(j, "updatedAt")) f.updated_at = parse_iso8601(*ts);
  return f;
}

Json encode(const llm::LlmRunConfig& c) {
  Json j;
  j["providerId"] = c.provider_id;
  j["model"] = c.model;
  j["features"] = c.features;
  j["lineRange"] = Json::array({c.line_range.start, c.line_range.end});
  j["promptTemplate"] = c.prompt_template;
  j["includeContextMaterials"] = c.include_context_materials;
  j["temperature"] = c.temperature;
  j["maxRetries"] = c.max_retries;
  return j;
}

llm::LlmRunConfig decode_run_config(const Json& j) {
  llm::LlmRunConfig c;
  try {
    c.provider_id = str(j, "providerId");
    c.model = str(j, "model");
    c.features = str_list(j, "features");
    const Json& range = field(j, "lineRange");
    if (range.is_array() && range.size() == 2 && range[0].is_number_integer() && range[1].is_number_integer()) {
      c.line_range = {range[0].get<int>(), range[1].get<int>()};
    } else if (range.is_object()) {
      c.line_range = {static_cast<int>(integer(range, "start")), static_cast<int>(integer(range, "end"))};
    } else {
      throw Error(errc::validation, "lineRange must be [start, end]", "lineRange");
    }
    c.prompt_template = opt_str(j, "promptTemplate").value_or("");
    if (auto it = j.find("includeContextMaterials"); it != j.end()) {
      if (!it->is_boolean()) throw Error(errc::validation, "includeContextMaterials must be a boolean", "includeContextMaterials");
      c.include_context_materials = it->get<bool>();
    }
    if (auto it = j.find("temperature"); it != j.end()) {
      if (!it->is_number()) throw Error(errc::validation, "temperature must be a number", "temperature");
      c.temperature = it->get<double>();
    }
    if (auto it = j.find("maxRetries"); it != j.end()) c.max_retries = static_cast<int>(integer(j, "maxRetries"));
  } catch (const Error& e) {
    throw Error(errc::invalid_config, e.what(), e.field());
  }
  return c;
}

Json encode(const llm::LlmRunResult& r, bool with_cells) {
  Json j;
  j["runId"] = r.run_id;
  j["status"] = llm::to_string(r.status);
  j["config"] = encode(r.config);
  j["annotator"] = llm::llm_annotator_id(r.config);
  j["errorCode"] = r.error_code ? Json(*r.error_code) : Json(nullptr);
  j["warnings"] = r.warnings;
  j["attempts"] = r.attempts;
  j["rawResponse"] = r.raw_response;
  j["createdAt"] = to_iso8601(r.created_at);
  if (with_cells) {
    Json cells = Json::array();
    for (const auto& c : r.cells) cells.push_back(encode(c));
    j["cells"] = std::move(cells);
  }
  return j;
}

llm::LlmRunResult decode_run(const Json& j) {
  llm::LlmRunResult r;
  r.run_id = str(j, "runId");
  r.status = llm::run_status_from_string(str(j, "status"));
  r.config = decode_run_config(field(j, "config"));
  r.error_code = opt_str(j, "errorCode");
  r.warnings = str_list(j, "warnings");
  if (auto it = j.find("attempts"); it != j.end() && it->is_number_integer()) r.attempts = it->get<int>();
  r.raw_response = opt_str(j, "rawResponse").value_or("");
  if (auto ts = opt_str(j, "createdAt")) r.created_at = parse_iso8601(*ts);
  if (auto it = j.find("cells"); it != j.end()) {
    for (const auto& c : *it) r.cells.push_back(decode_cell(c));
  }
  return r;
}

Json encode_metric(const std::optional<double>& v) {
  if (v) return *v;
  return std::string(kUndefined);
}

Json encode(const irr::AgreementReport& r) {
  Json j;
  j["raters"] = r.raters;
  j["lowAgreementThreshold"] = r.settings.low_agreement_threshold;
  j["irrPoolingMode"] = core::to_string(r.settings.pooling);
  Json per_code = Json::object();
  for (const auto& [code, a] : r.per_code) {
    Json e;
    e["kappaPairwiseMean"] = encode_metric(a.kappa_pairwise_mean);
    e["alpha"] = encode_metric(a.alpha);
    e["percentAgreement"] = encode_metric(a.percent_agreement);
    e["nUnits"] = a.n_units;
    e["nRaters"] = a.n_raters;
    per_code[code] = std::move(e);
  }
  j["perCode"] = std::move(per_code);
  Json per_category = Json::object();
  for (const auto& [category, a] : r.per_category) {
    Json e;
    e["alpha"] = encode_metric(a.alpha);
    e["meanKappa"] = encode_metric(a.mean_kappa);
    per_category[category] = std::move(e);
  }
  j["perCategory"] = std::move(per_category);
  if (r.settings.pooling != core::PoolingMode::per_code_mean) j["pooledAlpha"] = encode_metric(r.pooled_alpha);
  if (r.settings.pooling != core::PoolingMode::pooled_cells) j["meanKappa"] = encode_metric(r.mean_kappa);
  j["lowAgreementCodes"] = r.low_agreement_codes;
  Json dis = Json::array();
  for (const auto& d : r.disagreements) {
    Json e;
    e["lineNumber"] = d.line;
    e["codeId"] = d.code_id;
    Json labels = Json::object();
    for (const auto& [rater, label] : d.labels) labels[rater] = irr::to_string(label);
    e["labels"] = std::move(labels);
    dis.push_back(std::move(e));
  }
  j["disagreements"] = std::move(dis);
  return j;
}

void canonicalize(BundleContents& b) {
  auto& p = b.project;
  std::sort(p.annotators.begin(), p.annotators.end(), [](const auto& x, const auto& y) { return x.id < y.id; });
  std::sort(p.materials.begin(), p.materials.end(), [](const auto& x, const auto& y) { return x.id < y.id; });
  std::sort(b.cells.begin(), b.cells.end(), [](const core::AnnotationCell& x, const core::AnnotationCell& y) {
    return std::tie(x.line, x.code_id, x.annotator) < std::tie(y.line, y.code_id, y.annotator);
  });
  std::sort(b.notes.begin(), b.notes.end(), [](const auto& x, const auto& y) {
    return std::tie(x.line, x.annotator) < std::tie(y.line, y.annotator);
  });
  std::sort(b.flags.begin(), b.flags.end(), [](const auto& x, const auto& y) {
    return std::tie(x.line, x.annotator) < std::tie(y.line, y.annotator);
  });
  std::sort(b.runs.begin(), b.runs.end(), [](const auto& x, const auto& y) {
    return std::tie(x.created_at, x.run_id) < std::tie(y.created_at, y.run_id);
  });
}

Json encode(const BundleContents& in) {
  BundleContents b = in;
  canonicalize(b);
  Json j;
  j["schemaVersion"] = b.schema_version;
  Json project;
  project["id"] = b.project.id;
  project["name"] = b.project.name;
  project["settings"] = encode(b.project.settings);
  Json annotators = Json::array();
  for (const auto& a : b.project.annotators) annotators.push_back(encode(a));
  project["annotators"] = std::move(annotators);
  j["project"] = std::move(project);
  Json materials = Json::array();
  for (const auto& m : b.project.materials) materials.push_back(encode(m, true));
  j["materials"] = std::move(materials);
  j["codebook"] = b.project.codebook ? encode(*b.project.codebook) : Json(nullptr);
  j["transcript"] = b.project.transcript ? encode(*b.project.transcript) : Json(nullptr);
  Json cells = Json::array();
  for (const auto& c : b.cells) cells.push_back(encode(c));
  j["annotations"] = std::move(cells);
  Json notes = Json::array();
  for (const auto& n : b.notes) notes.push_back(encode(n));
  j["notes"] = std::move(notes);
  Json flags = Json::array();
  for (const auto& f : b.flags) flags.push_back(encode(f));
  j["flags"] = std::move(flags);
  Json runs = Json::array();
  for (const auto& r : b.runs) runs.push_back(encode(r, false));
  j["llmRuns"] = std::move(runs);
  return j;
}

BundleContents decode_bundle(const Json& j) {
  if (!j.is_object()) throw Error(errc::validation, "bundle must be a JSON object");
  const Json& version = field(j, "schemaVersion");
  if (!version.is_number_integer() || version.get<long long>() != kBundleSchemaVersion) {
    throw Error(errc::schema_version_unsupported,
                "unsupported bundle schemaVersion " + version.dump() + " (supported: " +
                    std::to_string(kBundleSchemaVersion) + ")",
                "schemaVersion");
  }
  BundleContents b;
  const Json& project = field(j, "project");
  b.project.id = opt_str(project, "id").value_or("");
  b.project.name = str(project, "name");
  if (auto it = project.find("settings"); it != project.end()) b.project.settings = decode_settings(*it);
  if (auto it = project.find("annotators"); it != project.end()) {
    for (const auto& a : *it) b.project.annotators.push_back(decode_annotator(a));
  }
  if (auto it = j.find("materials"); it != j.end()) {
    for (const auto& m : *it) b.project.materials.push_back(decode_attachment(m));
  }
  if (auto it = j.find("codebook"); it != j.end() && !it->is_null()) b.project.codebook = decode_codebook(*it);
  if (auto it = j.find("transcript"); it != j.end() && !it->is_null()) b.project.transcript = decode_transcript(*it);
  for (const auto& c : array_field(j, "annotations")) b.cells.push_back(decode_cell(c));
  if (auto it = j.find("notes"); it != j.end()) {
    for (const auto& n : *it) b.notes.push_back(decode_note(n));
  }
  if (auto it = j.find("flags"); it != j.end()) {
    for (const auto& f : *it) b.flags.push_back(decode_flag(f));
  }
  if (auto it = j.find("llmRuns"); it != j.end()) {
    for (const auto& r : *it) b.runs.push_back(decode_run(r));
  }
  canonicalize(b);
  return b;
}

}  // namespace educoder::codec
