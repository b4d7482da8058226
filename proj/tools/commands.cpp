#include "commands.hpp"

#include <csignal>
#include <pthread.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <thread>

#include "CLI11.hpp"

#include "educoder/api/client.hpp"
#include "educoder/api/queries.hpp"
#include "educoder/api/server.hpp"
#include "educoder/core/error.hpp"
#include "educoder/ingest/bundle.hpp"
#include "educoder/store/export.hpp"

namespace educoder::cli {

using codec::Json;

namespace {

std::string env_or(const char* name, std::string fallback) {
  const char* v = std::getenv(name);
  return v != nullptr && *v != '\0' ? std::string(v) : std::move(fallback);
}

struct Address {
  std::string host;
  int port = 0;
};

Address parse_address(const std::string& addr) {
  const auto colon = addr.rfind(':');
  if (colon == std::string::npos) throw Error(errc::validation, "address must be host:port", "addr");
  Address a{addr.substr(0, colon), 0};
  if (a.host.empty()) a.host = "0.0.0.0";
  try {
    std::size_t used = 0;
    a.port = std::stoi(addr.substr(colon + 1), &used);
    if (used != addr.size() - colon - 1 || a.port < 0 || a.port > 65535) throw std::out_of_range("port");
  } catch (const std::exception&) {
    throw Error(errc::validation, "invalid port in " + addr, "addr");
  }
  return a;
}

std::string read_file(const std::string& path) {
  if (path == "-") {
    std::ostringstream ss;
    ss << std::cin.rdbuf();
    return ss.str();
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(errc::validation, "cannot read " + path, "file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string file_name(const std::string& path) { return std::filesystem::path(path).filename().string(); }

std::string guess_media_type(const std::string& path) {
  auto ext = std::filesystem::path(path).extension().string();
  for (auto& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (ext == ".png") return "image/png";
  if (ext == ".jpg" || ext == ".jpeg") return "image/jpeg";
  if (ext == ".gif") return "image/gif";
  if (ext == ".txt") return "text/plain";
  if (ext == ".md") return "text/markdown";
  if (ext == ".pdf") return "application/pdf";
  return "application/octet-stream";
}

/// Where API commands send their requests: a running service, or a private
/// in-process one over a data file.
class Connection {
 public:
  Connection(const std::string& server, const std::string& token, const std::string& data) {
    if (data.empty()) {
      client_ = std::make_unique<api::ApiClient>(server, token);
      return;
    }
    store_ = std::make_unique<store::Store>(data);
    providers_ = std::make_unique<llm::ProviderRegistry>(env_or("EDUCODER_MOCK_FIXTURES", ""));
    server_ = std::make_unique<api::Server>(*store_, *providers_, env_or("EDUCODER_ADMIN_TOKEN", ""));
    const int port = server_->bind("127.0.0.1", 0);
    if (port < 0) throw api::TransportError("cannot bind a loopback port");
    thread_ = std::jthread([this] { server_->listen(); });
    server_->wait_until_ready();
    client_ = std::make_unique<api::ApiClient>("http://127.0.0.1:" + std::to_string(port), server_->admin_token());
  }
  ~Connection() {
    if (server_) {
      server_->runs().wait_idle();
      server_->stop();
    }
  }
  api::ApiClient& client() { return *client_; }

 private:
  std::unique_ptr<store::Store> store_;
  std::unique_ptr<llm::ProviderRegistry> providers_;
  std::unique_ptr<api::Server> server_;
  std::jthread thread_;
  std::unique_ptr<api::ApiClient> client_;
};

int report_api_error(const api::ApiResponse& r, std::ostream& err) {
  Json j = Json::parse(r.body, nullptr, false);
  if (!j.is_discarded() && j.contains("error")) {
    const auto& e = j["error"];
    err << "error: " << e.value("code", "") << ": " << e.value("message", "");
    if (e.contains("field") && e["field"].is_string()) err << " (field " << e["field"].get<std::string>() << ")";
    if (e.contains("row") && e["row"].is_number()) err << " (row " << e["row"].get<long long>() << ")";
    err << "\n";
  } else {
    err << "error: HTTP " << r.status << "\n";
  }
  return r.status >= 500 ? kExitTransport : kExitValidation;
}

/// Prints the body of a successful response, or the error.
int emit(const api::ApiResponse& r, std::ostream& out, std::ostream& err) {
  if (!r.ok()) return report_api_error(r, err);
  Json j = Json::parse(r.body, nullptr, false);
  if (j.is_discarded()) {
    out << r.body;
  } else {
    out << j.dump(2) << "\n";
  }
  return kExitOk;
}

std::string metric_cell(const Json& v) {
  if (!v.is_number()) return v.is_string() ? v.get<std::string>() : "-";
  std::ostringstream ss;
  ss << std::fixed << std::setprecision(4) << v.get<double>();
  return ss.str();
}

void print_table(const Json& report, std::ostream& out) {
  out << std::left << std::setw(28) << "code" << std::setw(12) << "kappa" << std::setw(12) << "alpha"
      << std::setw(12) << "percent" << std::setw(7) << "units" << std::setw(7) << "raters" << "low\n";
  std::set<std::string> low;
  for (const auto& c : report["lowAgreementCodes"]) low.insert(c.get<std::string>());
  for (const auto& [code, m] : report["perCode"].items()) {
    out << std::setw(28) << code << std::setw(12) << metric_cell(m["kappaPairwiseMean"]) << std::setw(12)
        << metric_cell(m["alpha"]) << std::setw(12) << metric_cell(m["percentAgreement"]) << std::setw(7)
        << m["nUnits"].get<int>() << std::setw(7) << m["nRaters"].get<int>() << (low.contains(code) ? "yes" : "")
        << "\n";
  }
  if (report.contains("perCategory") && !report["perCategory"].empty()) {
    out << "\n" << std::setw(28) << "category" << std::setw(12) << "alpha" << "meanKappa\n";
    for (const auto& [cat, m] : report["perCategory"].items()) {
      out << std::setw(28) << cat << std::setw(12) << metric_cell(m["alpha"]) << metric_cell(m["meanKappa"]) << "\n";
    }
  }
  out << "\n";
  if (report.contains("pooledAlpha")) out << "pooled alpha: " << metric_cell(report["pooledAlpha"]) << "\n";
  if (report.contains("meanKappa")) out << "mean kappa:   " << metric_cell(report["meanKappa"]) << "\n";
  out << "raters: ";
  for (std::size_t i = 0; i < report["raters"].size(); ++i) {
    out << (i ? ", " : "") << report["raters"][i].get<std::string>();
  }
  out << "\n";
}

std::string url_encode(const std::string& s) {
  std::ostringstream ss;
  for (unsigned char c : s) {
    if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~' || c == ',' || c == ':') {
      ss << c;
    } else {
      ss << '%' << std::uppercase << std::hex << std::setw(2) << std::setfill('0') << int(c) << std::dec;
    }
  }
  return ss.str();
}

int serve(const std::string& addr, const std::string& data, const std::string& fixtures, std::ostream& err) {
  const auto address = parse_address(addr);
  // Block the shutdown signals before any thread starts so only the waiter sees them.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  std::unique_ptr<store::Store> store;
  try {
    store = std::make_unique<store::Store>(data);
  } catch (const Error& e) {
    err << "error: " << e.code() << ": " << e.what() << "\n";
    return kExitFailure;
  }
  const bool fresh_token = !store->meta("admin_token").has_value();
  llm::ProviderRegistry providers(fixtures);
  api::Server server(*store, providers, env_or("EDUCODER_ADMIN_TOKEN", ""));
  const int port = server.bind(address.host, address.port);
  if (port < 0) {
    err << "error: cannot listen on " << addr << " (address in use?)\n";
    return kExitTransport;
  }
  if (fresh_token && std::getenv("EDUCODER_ADMIN_TOKEN") == nullptr) {
    err << "administrator token: " << server.admin_token() << "\n";
  }
  err << "listening on " << address.host << ":" << port << " (data: " << data << ")\n";

  std::jthread waiter([&server, signals] {
    int sig = 0;
    sigwait(&signals, &sig);
    server.stop();
  });
  const bool ok = server.listen();
  if (waiter.joinable()) {
    pthread_kill(waiter.native_handle(), SIGTERM);
    waiter.join();
  }
  server.runs().wait_idle();
  err << "stopped\n";
  return ok ? kExitOk : kExitTransport;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"EduCoder annotation platform"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  std::string server_url = env_or("EDUCODER_URL", "http://" + env_or("EDUCODER_ADDR", "127.0.0.1:8080"));
  std::string token = env_or("EDUCODER_TOKEN", "");
  std::string data;
  auto add_connection = [&](CLI::App* sub) {
    sub->add_option("--server", server_url, "Service base URL")->capture_default_str();
    sub->add_option("--token", token, "Bearer token (default: $EDUCODER_TOKEN)");
    sub->add_option("--data", data, "Work directly on a data file instead of a running service");
  };

  std::function<int()> action;

  // serve
  std::string addr = env_or("EDUCODER_ADDR", "127.0.0.1:8080");
  std::string serve_data = env_or("EDUCODER_DATA", "educoder.db");
  std::string fixtures = env_or("EDUCODER_MOCK_FIXTURES", "");
  auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP service");
  serve_cmd->add_option("--addr", addr, "Listen address host:port")->capture_default_str();
  serve_cmd->add_option("--data", serve_data, "SQLite data file")->capture_default_str();
  serve_cmd->add_option("--mock-fixtures", fixtures, "Fixture directory for the mock LLM provider");
  serve_cmd->callback([&] { action = [&] { return serve(addr, serve_data, fixtures, err); }; });

  // irr
  std::string bundle_path, project, raters, codes, format = "json";
  bool include_llm = false;
  auto* irr_cmd = app.add_subcommand("irr", "Print the agreement report");
  irr_cmd->add_option("--bundle", bundle_path, "Compute offline from an exported bundle");
  irr_cmd->add_option("--project", project, "Project id on the service");
  irr_cmd->add_option("--raters", raters, "Comma-separated rater ids");
  irr_cmd->add_option("--codes", codes, "Comma-separated code ids");
  irr_cmd->add_flag("--include-llm", include_llm, "Include LLM raters");
  irr_cmd->add_option("--format", format, "json or table")->check(CLI::IsMember({"json", "table"}));
  add_connection(irr_cmd);
  irr_cmd->callback([&] {
    action = [&]() -> int {
      Json report;
      if (!bundle_path.empty()) {
        auto snapshot = store::snapshot_from_bundle(ingest::import_annotated_bundle(read_file(bundle_path)));
        api::IrrQuery q;
        if (!raters.empty()) q.raters = api::split_list(raters);
        if (!codes.empty()) q.codes = api::split_list(codes);
        q.include_llm = include_llm;
        report = api::irr_report_json(snapshot, q);
      } else if (!project.empty()) {
        Connection conn(server_url, token, data);
        std::string path = "/api/projects/" + url_encode(project) + "/irr?includeLlm=" + (include_llm ? "true" : "false");
        if (!raters.empty()) path += "&raters=" + url_encode(raters);
        if (!codes.empty()) path += "&codes=" + url_encode(codes);
        auto r = conn.client().get(path);
        if (!r.ok()) return report_api_error(r, err);
        report = Json::parse(r.body);
      } else {
        throw Error(errc::validation, "give --bundle or --project", "bundle");
      }
      if (format == "table") {
        print_table(report, out);
      } else {
        out << report.dump(2) << "\n";
      }
      return kExitOk;
    };
  });

  // create-project
  std::string name;
  std::optional<double> threshold;
  auto* create_cmd = app.add_subcommand("create-project", "Create an empty project");
  create_cmd->add_option("--name", name, "Project name")->required();
  create_cmd->add_option("--threshold", threshold, "Low-agreement threshold");
  add_connection(create_cmd);
  create_cmd->callback([&] {
    action = [&] {
      Json body{{"name", name}};
      if (threshold) body["settings"] = {{"lowAgreementThreshold", *threshold}};
      Connection conn(server_url, token, data);
      return emit(conn.client().post_json("/api/projects", body.dump()), out, err);
    };
  });

  // add-annotator
  std::string annotator_id, display_name;
  auto* annot_cmd = app.add_subcommand("add-annotator", "Add a project member and print their token");
  annot_cmd->add_option("--project", project)->required();
  annot_cmd->add_option("--id", annotator_id)->required();
  annot_cmd->add_option("--name", display_name, "Display name");
  add_connection(annot_cmd);
  annot_cmd->callback([&] {
    action = [&] {
      Json body{{"id", annotator_id}};
      if (!display_name.empty()) body["displayName"] = display_name;
      Connection conn(server_url, token, data);
      return emit(conn.client().post_json("/api/projects/" + url_encode(project) + "/annotators", body.dump()), out,
                  err);
    };
  });

  // uploads
  std::string file, file_format, kind, title;
  auto upload = [&](const char* endpoint) {
    return [&, endpoint]() -> int {
      std::vector<api::FormPart> parts{{"file", read_file(file), file_name(file), guess_media_type(file)}};
      if (!file_format.empty()) parts.push_back({"format", file_format, "", ""});
      if (!kind.empty()) parts.push_back({"kind", kind, "", ""});
      if (!title.empty()) parts.push_back({"title", title, "", ""});
      Connection conn(server_url, token, data);
      return emit(conn.client().post_form("/api/projects/" + url_encode(project) + "/" + endpoint, parts), out, err);
    };
  };
  for (auto [cmd, endpoint, help] : {std::tuple{"upload-transcript", "transcript", "Upload a CSV/XLSX transcript"},
                                     std::tuple{"upload-codebook", "codebook", "Upload a CSV/XLSX codebook"},
                                     std::tuple{"upload-material", "materials", "Upload a context material"}}) {
    auto* sub = app.add_subcommand(cmd, help);
    sub->add_option("--project", project)->required();
    sub->add_option("--file", file)->required();
    if (std::string_view(endpoint) == "materials") {
      sub->add_option("--kind", kind, "instructions, image or other");
      sub->add_option("--title", title);
    } else {
      sub->add_option("--format", file_format, "csv or xlsx (default: from the file name)");
    }
    add_connection(sub);
    sub->callback([&, endpoint] { action = upload(endpoint); });
  }

  // export / import
  std::string export_format = "bundle", out_path;
  auto* export_cmd = app.add_subcommand("export", "Export a project as a bundle or CSV");
  export_cmd->add_option("--project", project)->required();
  export_cmd->add_option("--format", export_format)->check(CLI::IsMember({"bundle", "csv"}));
  export_cmd->add_option("--out", out_path, "Write to a file instead of stdout");
  add_connection(export_cmd);
  export_cmd->callback([&] {
    action = [&]() -> int {
      Connection conn(server_url, token, data);
      auto r = conn.client().get("/api/projects/" + url_encode(project) + "/export?format=" + export_format);
      if (!r.ok()) return report_api_error(r, err);
      if (out_path.empty()) {
        out << r.body;
      } else {
        std::ofstream f(out_path, std::ios::binary);
        f << r.body;
        if (!f) throw Error(errc::validation, "cannot write " + out_path, "out");
      }
      return kExitOk;
    };
  });

  auto* import_cmd = app.add_subcommand("import", "Create a project from a bundle");
  import_cmd->add_option("--file", file, "Bundle file, - for stdin")->required();
  add_connection(import_cmd);
  import_cmd->callback([&] {
    action = [&] {
      Connection conn(server_url, token, data);
      return emit(conn.client().post_json("/api/projects/import", read_file(file)), out, err);
    };
  });

  // llm-run
  std::string config_path;
  bool no_wait = false;
  int poll_ms = 200;
  auto* llm_cmd = app.add_subcommand("llm-run", "Start an LLM annotation run and wait for it");
  llm_cmd->add_option("--project", project)->required();
  llm_cmd->add_option("--config", config_path, "Run configuration JSON")->required();
  llm_cmd->add_flag("--no-wait", no_wait, "Print the run id and return immediately");
  llm_cmd->add_option("--poll-ms", poll_ms)->capture_default_str();
  add_connection(llm_cmd);
  llm_cmd->callback([&] {
    action = [&]() -> int {
      const auto config = read_file(config_path);
      Connection conn(server_url, token, data);
      const auto base = "/api/projects/" + url_encode(project) + "/llm-runs";
      auto started = conn.client().post_json(base, config);
      if (!started.ok() || no_wait) return emit(started, out, err);
      const auto run_id = Json::parse(started.body)["runId"].get<std::string>();
      for (;;) {
        auto r = conn.client().get(base + "/" + url_encode(run_id));
        if (!r.ok()) return report_api_error(r, err);
        Json run = Json::parse(r.body);
        const auto status = run.value("status", "");
        if (status == "running") {
          std::this_thread::sleep_for(std::chrono::milliseconds(poll_ms));
          continue;
        }
        out << run.dump(2) << "\n";
        if (status != "failed") return kExitOk;
        err << "error: run failed: " << run.value("errorCode", "") << "\n";
        return run.value("errorCode", "") == errc::provider_unreachable ? kExitTransport : kExitValidation;
      }
    };
  });

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    return action ? action() : kExitValidation;
  } catch (const Error& e) {
    err << "error: " << e.code() << ": " << e.what();
    if (!e.field().empty()) err << " (field " << e.field() << ")";
    if (e.row()) err << " (row " << *e.row() << ")";
    err << "\n";
    return e.code() == errc::storage_failure ? kExitFailure : kExitValidation;
  } catch (const api::TransportError& e) {
    err << "error: " << e.what() << "\n";
    return kExitTransport;
  } catch (const Json::exception& e) {
    err << "error: unexpected response: " << e.what() << "\n";
    return kExitTransport;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}

}  // namespace educoder::cli
