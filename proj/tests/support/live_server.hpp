#pragma once
// In-process service on an ephemeral port.

#include <memory>
#include <string>
#include <thread>

#include "educoder/api/client.hpp"
#include "educoder/api/server.hpp"
#include "educoder/llm/provider.hpp"
#include "educoder/store/store.hpp"

namespace fixtures {

struct LiveServer {
  educoder::store::Store store;
  educoder::llm::ProviderRegistry providers{EDUCODER_TEST_FIXTURES "/mock"};
  educoder::api::Server server{store, providers, "admin-secret"};
  int port = -1;
  std::jthread thread;

  LiveServer() {
    port = server.bind("127.0.0.1", 0);
    thread = std::jthread([this] { server.listen(); });
    server.wait_until_ready();
  }
  ~LiveServer() {
    server.runs().wait_idle();
    server.stop();
  }

  [[nodiscard]] std::string url() const { return "http://127.0.0.1:" + std::to_string(port); }
  [[nodiscard]] std::unique_ptr<educoder::api::ApiClient> client(const std::string& token) const {
    return std::make_unique<educoder::api::ApiClient>(url(), token);
  }
  [[nodiscard]] std::unique_ptr<educoder::api::ApiClient> admin() const { return client("admin-secret"); }
};

}  // namespace fixtures
