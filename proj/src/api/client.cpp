#include "educoder/api/client.hpp"

#include "httplib.h"

namespace educoder::api {

namespace {

ApiResponse unwrap(const httplib::Result& r) {
  if (!r) throw TransportError("request failed: " + httplib::to_string(r.error()));
  return {r->status, r->body, r->get_header_value("Content-Type")};
}

}  // namespace

ApiClient::ApiClient(const std::string& base_url, std::string token)
    : http_(std::make_unique<httplib::Client>(base_url)), token_(std::move(token)) {
  if (!http_->is_valid()) throw TransportError("invalid server address " + base_url);
  http_->set_connection_timeout(5);
  http_->set_read_timeout(120);
  if (!token_.empty()) http_->set_bearer_token_auth(token_);
}

ApiClient::~ApiClient() = default;

ApiResponse ApiClient::get(const std::string& path) { return unwrap(http_->Get(path)); }

ApiResponse ApiClient::post_json(const std::string& path, const std::string& body) {
  return unwrap(http_->Post(path, body, "application/json"));
}

ApiResponse ApiClient::put_json(const std::string& path, const std::string& body) {
  return unwrap(http_->Put(path, body, "application/json"));
}

ApiResponse ApiClient::post_form(const std::string& path, const std::vector<FormPart>& parts) {
  httplib::MultipartFormDataItems items;
  for (const auto& p : parts) items.push_back({p.name, p.content, p.filename, p.content_type});
  return unwrap(http_->Post(path, items));
}

}  // namespace educoder::api
