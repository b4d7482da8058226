#include "educoder/api/server.hpp"

#include <sys/socket.h>

#include <charconv>

#include "httplib.h"

#include "educoder/api/queries.hpp"
#include "educoder/core/error.hpp"
#include "educoder/ingest/bundle.hpp"
#include "educoder/ingest/codebook.hpp"
#include "educoder/ingest/filter.hpp"
#include "educoder/ingest/transcript.hpp"
#include "educoder/llm/prompt.hpp"
#include "educoder/llm/runner.hpp"
#include "educoder/store/export.hpp"

namespace educoder::api {

using codec::Json;

namespace {

constexpr const char* kJson = "application/json";
constexpr const char* kAsOfHeader = "X-EduCoder-AsOf";

int status_for(std::string_view code) {
  if (code == errc::unauthenticated) return 401;
  if (code == errc::forbidden || code == errc::annotator_not_member) return 403;
  if (code == errc::unknown_project || code == errc::not_found) return 404;
  if (code == errc::run_already_active) return 409;
  if (code == errc::storage_failure) return 500;
  if (code == errc::validation || code == errc::line_range_out_of_bounds) return 400;
  return 422;
}

Json error_json(const Error& e) {
  Json err;
  err["code"] = e.code();
  err["message"] = e.what();
  err["field"] = e.field().empty() ? Json(nullptr) : Json(e.field());
  err["row"] = e.row() ? Json(*e.row()) : Json(nullptr);
  err["details"] = e.details();
  return err;
}

void send_json(httplib::Response& res, int status, const Json& body) {
  res.status = status;
  res.set_content(body.dump(), kJson);
}

void send_error(httplib::Response& res, int status, const Error& e) {
  send_json(res, status, Json{{"error", error_json(e)}});
}

Json parse_body(const httplib::Request& req) {
  Json j = Json::parse(req.body, nullptr, false);
  if (j.is_discarded()) throw Error(errc::validation, "request body is not valid JSON", "body");
  return j;
}

std::optional<std::string> param(const httplib::Request& req, const char* name) {
  if (!req.has_param(name)) return std::nullopt;
  return req.get_param_value(name);
}

core::LineNumber int_param(const std::string& text, const char* name) {
  core::LineNumber v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw Error(errc::validation, std::string(name) + " must be an integer", name);
  }
  return v;
}

bool bool_param(const httplib::Request& req, const char* name, bool fallback) {
  auto v = param(req, name);
  if (!v) return fallback;
  if (*v == "true" || *v == "1") return true;
  if (*v == "false" || *v == "0") return false;
  throw Error(errc::validation, std::string(name) + " must be true or false", name);
}

std::optional<std::pair<core::LineNumber, core::LineNumber>> range_params(const httplib::Request& req,
                                                                          core::LineNumber line_count) {
  auto from = param(req, "from");
  auto to = param(req, "to");
  if (!from && !to) return std::nullopt;
  return std::pair{from ? int_param(*from, "from") : 1, to ? int_param(*to, "to") : line_count};
}

httplib::MultipartFormData upload_file(const httplib::Request& req) {
  if (!req.is_multipart_form_data() || !req.has_file("file")) {
    throw Error(errc::validation, "expected a multipart upload with a \"file\" part", "file");
  }
  return req.get_file_value("file");
}

std::optional<std::string> form_field(const httplib::Request& req, const char* name) {
  if (!req.has_file(name)) return std::nullopt;
  return req.get_file_value(name).content;
}

ingest::FileFormat upload_format(const httplib::Request& req, const httplib::MultipartFormData& file) {
  if (auto f = form_field(req, "format")) return ingest::file_format_from_string(*f);
  return ingest::file_format_from_filename(file.filename);
}

/// Items may be given as {"<key>": [...]} or as a bare array.
const Json& batch_items(const Json& body, const char* key) {
  if (body.is_array()) return body;
  if (body.is_object()) {
    if (auto it = body.find(key); it != body.end() && it->is_array()) return *it;
  }
  throw Error(errc::validation, std::string("expected an array under \"") + key + "\"", key);
}

}  // namespace

// ---------------------------------------------------------------------------

RunManager::RunManager(store::Store& store, const llm::ProviderRegistry& providers)
    : store_(store), providers_(providers) {}

RunManager::~RunManager() {
  wait_idle();
  workers_.clear();
}

std::string RunManager::start(const std::string& project_id, const llm::LlmRunConfig& config) {
  const auto snap = store_.snapshot(project_id);
  const auto& p = *snap->project;
  if (!p.codebook || !p.transcript) {
    throw Error(errc::invalid_config, "project needs a codebook and a transcript before an LLM run", "project");
  }
  llm::validate_config(config, *p.codebook, *p.transcript);
  auto provider = providers_.resolve(config.provider_id);

  Key key{project_id, config.provider_id, config.model};
  std::lock_guard lock(mutex_);
  if (active_.contains(key)) {
    throw Error(errc::run_already_active,
                "a run for " + config.provider_id + "/" + config.model + " is already active in this project",
                "model");
  }
  llm::LlmRunResult run;
  run.run_id = llm::new_run_id();
  run.config = config;
  run.status = llm::RunStatus::running;
  run.created_at = now_utc();
  store_.save_run(project_id, run);
  active_.insert(key);
  const std::string id = run.run_id;
  workers_.emplace_back([this, project_id, run = std::move(run), provider = std::move(provider), key]() mutable {
    execute(project_id, std::move(run), std::move(provider), std::move(key));
  });
  return id;
}

void RunManager::execute(const std::string& project_id, llm::LlmRunResult run, llm::Provider provider, Key key) {
  llm::LlmRunResult result;
  try {
    const auto snap = store_.snapshot(project_id);
    result = llm::run_annotation(run.config, *snap->project, provider, run.run_id);
  } catch (const Error& e) {
    result = run;
    result.status = llm::RunStatus::failed;
    result.error_code = e.code();
    result.warnings.push_back(e.what());
  } catch (const std::exception& e) {
    result = run;
    result.status = llm::RunStatus::failed;
    result.error_code = std::string(errc::provider_unreachable);
    result.warnings.push_back(e.what());
  }
  result.created_at = run.created_at;

  try {
    if (!result.cells.empty()) {
      const auto rater = llm::llm_annotator_id(result.config);
      store_.add_annotator(project_id, {rater, core::RaterKind::llm, result.config.provider_id + "/" + result.config.model});
      for (auto& cell : result.cells) {
        try {
          cell.revision = store_.upsert_cell(project_id, cell);
        } catch (const Error& e) {
          result.warnings.push_back("not stored: line " + std::to_string(cell.line) + ", code \"" + cell.code_id +
                                    "\": " + e.what());
          if (result.status == llm::RunStatus::complete) result.status = llm::RunStatus::partial;
        }
      }
    }
    store_.save_run(project_id, result);
  } catch (const std::exception& e) {
    result.status = llm::RunStatus::failed;
    result.error_code = std::string(errc::storage_failure);
    result.warnings.push_back(e.what());
    try {
      store_.save_run(project_id, result);
    } catch (...) {
    }
  }

  std::lock_guard lock(mutex_);
  active_.erase(key);
  idle_.notify_all();
}

void RunManager::wait_idle() {
  std::unique_lock lock(mutex_);
  idle_.wait(lock, [this] { return active_.empty(); });
}

// ---------------------------------------------------------------------------

Server::Server(store::Store& store, const llm::ProviderRegistry& providers, std::string admin_token)
    : store_(store),
      providers_(providers),
      auth_(store, std::move(admin_token)),
      runs_(store, providers),
      http_(std::make_unique<httplib::Server>()) {
  // SO_REUSEPORT would let a second instance share the address.
  http_->set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
  });
  http_->set_payload_max_length(64u << 20);
  routes();
}

Server::~Server() {
  stop();
  runs_.wait_idle();
}

int Server::bind(const std::string& host, int port) {
  if (port == 0) return http_->bind_to_any_port(host);
  return http_->bind_to_port(host, port) ? port : -1;
}

bool Server::listen() { return http_->listen_after_bind(); }

void Server::stop() {
  if (http_->is_running()) http_->stop();
}

void Server::wait_until_ready() const { http_->wait_until_ready(); }

void Server::routes() {
  using httplib::Request;
  using httplib::Response;
  auto& s = *http_;

  auto principal_of = [this](const Request& req) {
    auto p = auth_.authenticate(req.get_header_value("Authorization"));
    if (!p) throw Error(errc::unauthenticated, "missing or unknown bearer token", "Authorization");
    return *p;
  };
  auto require_admin = [](const Principal& p) {
    if (!p.is_admin()) throw Error(errc::forbidden, "administrator role required", "Authorization");
  };
  auto member_snapshot = [this](const Principal& who, const Request& req) {
    auto snap = store_.snapshot(req.path_params.at("id"));
    if (!who.is_admin() && snap->project->find_annotator(who.annotator_id) == nullptr) {
      throw Error(errc::forbidden, who.annotator_id + " is not a member of this project", "Authorization");
    }
    return snap;
  };
  auto admin_snapshot = [this, require_admin](const Principal& who, const Request& req) {
    require_admin(who);
    return store_.snapshot(req.path_params.at("id"));
  };
  // true when the caller's asOf is current and a 304 was sent.
  auto not_modified = [](const Request& req, Response& res, const store::Snapshot& snap) {
    res.set_header(kAsOfHeader, std::to_string(snap.as_of));
    auto as_of = param(req, "asOf");
    if (as_of && *as_of == std::to_string(snap.as_of)) {
      res.status = 304;
      return true;
    }
    return false;
  };

  using Handler = std::function<void(const Request&, Response&)>;
  auto guarded = [](Handler fn) {
    return [fn = std::move(fn)](const Request& req, Response& res) {
      try {
        fn(req, res);
      } catch (const Error& e) {
        send_error(res, status_for(e.code()), e);
      } catch (const Json::exception& e) {
        send_error(res, 400, Error(errc::validation, e.what(), "body"));
      } catch (const std::exception& e) {
        send_error(res, 500, Error(errc::storage_failure, e.what()));
      }
    };
  };

  s.Get("/api/health", guarded([](const Request&, Response& res) { send_json(res, 200, {{"status", "ok"}}); }));

  s.Get("/api/projects", guarded([=, this](const Request& req, Response& res) {
    const auto who = principal_of(req);
    Json list = Json::array();
    for (const auto& summary : store_.list_projects()) {
      if (!who.is_admin()) {
        auto snap = store_.snapshot(summary.id);
        if (snap->project->find_annotator(who.annotator_id) == nullptr) continue;
      }
      list.push_back({{"id", summary.id}, {"name", summary.name}});
    }
    send_json(res, 200, {{"projects", std::move(list)}});
  }));

  s.Post("/api/projects", guarded([=, this](const Request& req, Response& res) {
    require_admin(principal_of(req));
    const Json body = parse_body(req);
    if (!body.is_object() || !body.contains("name") || !body["name"].is_string()) {
      throw Error(errc::validation, "name is required", "name");
    }
    core::ProjectSettings settings;
    if (auto it = body.find("settings"); it != body.end()) settings = codec::decode_settings(*it);
    const auto id = store_.create_project(body["name"].get<std::string>(), settings);
    send_json(res, 201, project_json(*store_.snapshot(id)));
  }));

  s.Post("/api/projects/import", guarded([=, this](const Request& req, Response& res) {
    require_admin(principal_of(req));
    const std::string& bytes = req.is_multipart_form_data() ? upload_file(req).content : req.body;
    auto contents = ingest::import_annotated_bundle(bytes);
    const auto id = store_.import_bundle(contents);
    send_json(res, 201, project_json(*store_.snapshot(id)));
  }));

  s.Get("/api/projects/:id", guarded([=](const Request& req, Response& res) {
    const auto snap = member_snapshot(principal_of(req), req);
    if (not_modified(req, res, *snap)) return;
    send_json(res, 200, project_json(*snap));
  }));

  s.Put("/api/projects/:id/settings", guarded([=, this](const Request& req, Response& res) {
    const auto snap = admin_snapshot(principal_of(req), req);
    store_.update_settings(snap->project_id, codec::decode_settings(parse_body(req)));
    send_json(res, 200, codec::encode(store_.snapshot(snap->project_id)->project->settings));
  }));

  s.Post("/api/projects/:id/annotators", guarded([=, this](const Request& req, Response& res) {
    const auto snap = admin_snapshot(principal_of(req), req);
    const Json body = parse_body(req);
    if (!body.is_object() || !body.contains("id") || !body["id"].is_string()) {
      throw Error(errc::validation, "id is required", "id");
    }
    core::Annotator a;
    a.id = body["id"].get<std::string>();
    if (a.id == kAdminId || core::rater_kind_of(a.id) == core::RaterKind::llm) {
      throw Error(errc::validation, "annotator id " + a.id + " is reserved", "id");
    }
    if (auto it = body.find("displayName"); it != body.end() && it->is_string()) a.display_name = it->get<std::string>();
    store_.add_annotator(snap->project_id, a);
    send_json(res, 200, {{"annotatorId", a.id}, {"token", auth_.token_for(a.id)}});
  }));

  s.Post("/api/projects/:id/transcript", guarded([=, this](const Request& req, Response& res) {
    const auto snap = admin_snapshot(principal_of(req), req);
    const auto& file = upload_file(req);
    std::optional<core::ColumnMapping> mapping;
    if (auto m = form_field(req, "mapping")) {
      Json j = Json::parse(*m, nullptr, false);
      if (j.is_discarded()) throw Error(errc::validation, "mapping is not valid JSON", "mapping");
      mapping = codec::decode_mapping(j);
    }
    auto transcript = ingest::parse_transcript(file.content, upload_format(req, file), mapping);
    Json body;
    body["mapping"] = codec::encode(transcript.mapping);
    body["lineCount"] = transcript.line_count();
    body["transcriptVersion"] = store_.replace_transcript(snap->project_id, std::move(transcript));
    body["quarantinedCells"] = store_.quarantined_cells(snap->project_id).size();
    body["asOf"] = store_.snapshot(snap->project_id)->as_of;
    send_json(res, 200, body);
  }));

  s.Post("/api/projects/:id/codebook", guarded([=, this](const Request& req, Response& res) {
    const auto snap = admin_snapshot(principal_of(req), req);
    const auto& file = upload_file(req);
    auto codebook = ingest::parse_codebook(file.content, upload_format(req, file));
    Json body;
    body["codes"] = codec::encode(codebook);
    body["codebookVersion"] = store_.replace_codebook(snap->project_id, std::move(codebook));
    body["quarantinedCells"] = store_.quarantined_cells(snap->project_id).size();
    body["asOf"] = store_.snapshot(snap->project_id)->as_of;
    send_json(res, 200, body);
  }));

  s.Post("/api/projects/:id/materials", guarded([=, this](const Request& req, Response& res) {
    const auto snap = admin_snapshot(principal_of(req), req);
    const auto& file = upload_file(req);
    core::Attachment a;
    a.bytes = file.content;
    a.media_type = file.content_type.empty() ? "application/octet-stream" : file.content_type;
    a.title = form_field(req, "title").value_or(file.filename.empty() ? "material" : file.filename);
    if (auto kind = form_field(req, "kind")) {
      a.kind = core::attachment_kind_from_string(*kind);
    } else if (a.media_type.starts_with("image/")) {
      a.kind = core::AttachmentKind::image;
    } else if (a.media_type.starts_with("text/")) {
      a.kind = core::AttachmentKind::instructions;
    }
    a.id = store_.add_material(snap->project_id, a);
    send_json(res, 200, codec::encode(a, false));
  }));

  s.Get("/api/projects/:id/materials/:materialId", guarded([=](const Request& req, Response& res) {
    const auto snap = member_snapshot(principal_of(req), req);
    const auto& wanted = req.path_params.at("materialId");
    for (const auto& m : snap->project->materials) {
      if (m.id == wanted) {
        res.set_content(m.bytes, m.media_type);
        return;
      }
    }
    throw Error(errc::not_found, "unknown material " + wanted, "materialId");
  }));

  s.Get("/api/projects/:id/utterances", guarded([=](const Request& req, Response& res) {
    const auto who = principal_of(req);
    const auto snap = member_snapshot(who, req);
    if (not_modified(req, res, *snap)) return;
    const auto& p = *snap->project;
    const std::string annotator = who.is_admin() ? param(req, "annotator").value_or(who.annotator_id) : who.annotator_id;

    Json lines = Json::array();
    if (p.transcript) {
      ingest::UtteranceFilter filter;
      filter.keyword = param(req, "keyword");
      if (auto sp = param(req, "speakers")) {
        auto list = split_list(*sp);
        filter.speakers = std::set<std::string>(list.begin(), list.end());
      }
      filter.segment = param(req, "segment");
      filter.line_range = range_params(req, p.transcript->line_count());

      std::map<core::LineNumber, Json> cells;
      for (const auto& c : snap->cells) {
        if (c.annotator != annotator) continue;
        auto& j = cells[c.line];
        if (j.is_null()) j = Json::object();
        j[c.code_id] = {{"value", codec::encode(c.value)}, {"revision", c.revision}};
      }
      std::map<core::LineNumber, std::string> notes;
      for (const auto& n : snap->notes) {
        if (n.annotator == annotator) notes[n.line] = n.text;
      }
      std::map<core::LineNumber, const core::Flag*> flags;
      for (const auto& f : snap->flags) {
        if (f.annotator == annotator) flags[f.line] = &f;
      }
      for (auto line : ingest::apply_filter(*p.transcript, filter)) {
        const auto& u = p.transcript->at_line(line);
        Json l;
        l["lineNumber"] = line;
        l["speaker"] = u.speaker;
        l["text"] = u.text;
        l["segment"] = u.segment ? Json(*u.segment) : Json(nullptr);
        l["timestamp"] = u.timestamp ? Json(*u.timestamp) : Json(nullptr);
        auto c = cells.find(line);
        l["cells"] = c == cells.end() ? Json::object() : c->second;
        auto n = notes.find(line);
        l["note"] = n == notes.end() ? Json(nullptr) : Json(n->second);
        auto f = flags.find(line);
        l["flagged"] = f != flags.end();
        l["flagReason"] = f != flags.end() && f->second->reason ? Json(*f->second->reason) : Json(nullptr);
        lines.push_back(std::move(l));
      }
    } else if (req.has_param("from") || req.has_param("to")) {
      throw Error(errc::line_range_out_of_bounds, "project has no transcript", "from");
    }
    send_json(res, 200, {{"asOf", snap->as_of}, {"annotator", annotator}, {"lines", std::move(lines)}});
  }));

  // Shared shape of the three batch writes: identity check up front, then
  // each item commits or fails on its own.
  using ItemWriter = std::function<Json(const std::string& project_id, const Json& item)>;
  auto batch = [=, this](const char* key, ItemWriter write) {
    return guarded([=, this](const Request& req, Response& res) {
      const auto who = principal_of(req);
      const auto snap = member_snapshot(who, req);
      const Json body = parse_body(req);
      const Json& items = batch_items(body, key);
      Json normalized = Json::array();
      for (const auto& item : items) {
        Json copy = item;
        if (copy.is_object() && !copy.contains("annotator") && !who.is_admin()) copy["annotator"] = who.annotator_id;
        if (!who.is_admin() && copy.is_object() && copy["annotator"] != Json(who.annotator_id)) {
          throw Error(errc::forbidden, "annotators may write only under their own id", "annotator");
        }
        normalized.push_back(std::move(copy));
      }
      Json results = Json::array();
      std::size_t failed = 0;
      for (std::size_t i = 0; i < normalized.size(); ++i) {
        Json outcome;
        outcome["index"] = i;
        try {
          outcome.update(write(snap->project_id, normalized[i]));
          outcome["ok"] = true;
        } catch (const Error& e) {
          outcome["ok"] = false;
          outcome["error"] = error_json(e);
          ++failed;
        } catch (const Json::exception& e) {
          outcome["ok"] = false;
          outcome["error"] = error_json(Error(errc::validation, e.what(), key));
          ++failed;
        }
        results.push_back(std::move(outcome));
      }
      send_json(res, 200,
                {{"asOf", store_.snapshot(snap->project_id)->as_of}, {"failed", failed}, {"results", std::move(results)}});
    });
  };
  auto human_only = [](const std::string& annotator) {
    if (core::rater_kind_of(annotator) == core::RaterKind::llm) {
      throw Error(errc::llm_cells_immutable, "LLM raters are written only by LLM runs", "annotator");
    }
  };

  s.Put("/api/projects/:id/annotations/cells",
        batch("cells", [=, this](const std::string& project_id, const Json& item) {
          auto cell = codec::decode_cell(item);
          human_only(cell.annotator);
          cell.revision = store_.upsert_cell(project_id, cell);
          return Json{{"revision", cell.revision}, {"annotator", cell.annotator}, {"lineNumber", cell.line}, {"codeId", cell.code_id}};
        }));
  s.Put("/api/projects/:id/annotations/notes",
        batch("notes", [=, this](const std::string& project_id, const Json& item) {
          auto note = codec::decode_note(item);
          human_only(note.annotator);
          store_.set_note(project_id, note);
          return Json{{"annotator", note.annotator}, {"lineNumber", note.line}};
        }));
  s.Put("/api/projects/:id/annotations/flags",
        batch("flags", [=, this](const std::string& project_id, const Json& item) {
          auto flag = codec::decode_flag(item);
          human_only(flag.annotator);
          store_.toggle_flag(project_id, flag);
          return Json{{"annotator", flag.annotator}, {"lineNumber", flag.line}, {"active", flag.active}};
        }));

  s.Get("/api/projects/:id/irr", guarded([=](const Request& req, Response& res) {
    const auto snap = member_snapshot(principal_of(req), req);
    if (not_modified(req, res, *snap)) return;
    IrrQuery q;
    if (auto r = param(req, "raters")) q.raters = split_list(*r);
    if (auto c = param(req, "codes")) q.codes = split_list(*c);
    q.include_llm = bool_param(req, "includeLlm", false);
    send_json(res, 200, irr_report_json(*snap, q));
  }));

  s.Get("/api/projects/:id/comparison", guarded([=](const Request& req, Response& res) {
    const auto snap = member_snapshot(principal_of(req), req);
    if (not_modified(req, res, *snap)) return;
    ComparisonQuery q;
    const auto& t = snap->project->transcript;
    q.range = range_params(req, t ? t->line_count() : 0);
    q.include_llm = bool_param(req, "includeLlm", true);
    Json body = comparison_json(*snap, q);
    body["asOf"] = snap->as_of;
    send_json(res, 200, body);
  }));

  s.Post("/api/projects/:id/llm-runs/preview", guarded([=](const Request& req, Response& res) {
    const auto snap = admin_snapshot(principal_of(req), req);
    const auto config = codec::decode_run_config(parse_body(req));
    const auto& p = *snap->project;
    if (!p.codebook || !p.transcript) {
      throw Error(errc::invalid_config, "project needs a codebook and a transcript before an LLM run", "project");
    }
    llm::validate_config(config, *p.codebook, *p.transcript);
    auto prompt = llm::build_prompt(config, *p.codebook, *p.transcript, p.materials);
    send_json(res, 200, {{"prompt", prompt.text}, {"warnings", prompt.warnings}});
  }));

  s.Post("/api/projects/:id/llm-runs", guarded([=, this](const Request& req, Response& res) {
    const auto snap = admin_snapshot(principal_of(req), req);
    const auto run_id = runs_.start(snap->project_id, codec::decode_run_config(parse_body(req)));
    send_json(res, 202, {{"runId", run_id}, {"status", "running"}});
  }));

  s.Get("/api/projects/:id/llm-runs", guarded([=](const Request& req, Response& res) {
    const auto snap = admin_snapshot(principal_of(req), req);
    Json runs = Json::array();
    for (const auto& r : snap->runs) runs.push_back(codec::encode(r, false));
    send_json(res, 200, {{"runs", std::move(runs)}});
  }));

  s.Get("/api/projects/:id/llm-runs/:runId", guarded([=, this](const Request& req, Response& res) {
    const auto snap = admin_snapshot(principal_of(req), req);
    auto run = store_.find_run(snap->project_id, req.path_params.at("runId"));
    if (!run) throw Error(errc::not_found, "unknown run " + req.path_params.at("runId"), "runId");
    send_json(res, 200, codec::encode(*run, true));
  }));

  s.Get("/api/projects/:id/export", guarded([=](const Request& req, Response& res) {
    const auto snap = admin_snapshot(principal_of(req), req);
    const auto format = param(req, "format").value_or("bundle");
    res.set_header(kAsOfHeader, std::to_string(snap->as_of));
    if (format == "bundle") {
      res.set_content(store::export_bundle_json(*snap), kJson);
    } else if (format == "csv") {
      res.set_content(store::export_annotations_csv(*snap), "text/csv; charset=utf-8");
    } else {
      throw Error(errc::validation, "format must be bundle or csv", "format");
    }
  }));

  s.set_error_handler([](const Request&, Response& res) {
    if (res.body.empty() && res.status == 404) {
      send_error(res, 404, Error(errc::not_found, "no such endpoint", "path"));
    }
  });
}

}  // namespace educoder::api
