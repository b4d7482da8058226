#pragma once
// HTTP/1.1 JSON service. Handlers run on the server's worker threads and
// share state only through the store. LLM runs execute on background threads.

#include <condition_variable>
#include <memory>
#include <mutex>
#include <set>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "educoder/api/auth.hpp"
#include "educoder/llm/provider.hpp"
#include "educoder/store/store.hpp"

namespace httplib {
class Server;
}

namespace educoder::api {

/// At most one active run per (project, provider, model).
class RunManager {
 public:
  RunManager(store::Store& store, const llm::ProviderRegistry& providers);
  ~RunManager();
  RunManager(const RunManager&) = delete;
  RunManager& operator=(const RunManager&) = delete;

  /// Validates, records the run as "running" and starts it. Throws
  /// Error(invalidConfig) or Error(runAlreadyActive).
  std::string start(const std::string& project_id, const llm::LlmRunConfig& config);
  /// Blocks until no run is active.
  void wait_idle();

 private:
  using Key = std::tuple<std::string, std::string, std::string>;
  void execute(const std::string& project_id, llm::LlmRunResult run, llm::Provider provider, Key key);

  store::Store& store_;
  const llm::ProviderRegistry& providers_;
  std::mutex mutex_;
  std::condition_variable idle_;
  std::set<Key> active_;
  std::vector<std::jthread> workers_;
};

class Server {
 public:
  Server(store::Store& store, const llm::ProviderRegistry& providers, std::string admin_token = {});
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  /// Binds without serving; port 0 picks a free port. Returns the bound port
  /// or -1.
  int bind(const std::string& host, int port);
  /// Serves until stop(); call after bind().
  bool listen();
  void stop();
  void wait_until_ready() const;

  [[nodiscard]] const std::string& admin_token() const noexcept { return auth_.admin_token(); }
  [[nodiscard]] RunManager& runs() noexcept { return runs_; }

 private:
  void routes();

  store::Store& store_;
  const llm::ProviderRegistry& providers_;
  Authenticator auth_;
  RunManager runs_;
  std::unique_ptr<httplib::Server> http_;
};

}  // namespace educoder::api
