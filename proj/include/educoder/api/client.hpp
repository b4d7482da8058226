#pragma once
// Minimal HTTP client for the command-line tool.

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace httplib {
class Client;
}

namespace educoder::api {

/// The service could not be reached or the connection broke.
class TransportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ApiResponse {
  int status = 0;
  std::string body;
  std::string content_type;

  [[nodiscard]] bool ok() const noexcept { return status >= 200 && status < 300; }
};

struct FormPart {
  std::string name;
  std::string content;
  std::string filename;
  std::string content_type;
};

class ApiClient {
 public:
  /// base_url like "http://127.0.0.1:8080".
  ApiClient(const std::string& base_url, std::string token);
  ~ApiClient();
  ApiClient(const ApiClient&) = delete;
  ApiClient& operator=(const ApiClient&) = delete;

  ApiResponse get(const std::string& path);
  ApiResponse post_json(const std::string& path, const std::string& body);
  ApiResponse put_json(const std::string& path, const std::string& body);
  ApiResponse post_form(const std::string& path, const std::vector<FormPart>& parts);

 private:
  std::unique_ptr<httplib::Client> http_;
  std::string token_;
};

}  // namespace educoder::api
