#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>

#include "educoder/llm/types.hpp"

namespace educoder::llm {

/// Thrown by a provider call. Messages never contain credentials.
class ProviderError : public std::runtime_error {
 public:
  enum class Kind { transport, authentication };
  ProviderError(Kind kind, const std::string& message) : std::runtime_error(message), kind_(kind) {}
  [[nodiscard]] Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

struct ProviderRequest {
  const std::string& prompt;
  const LlmRunConfig& config;
  int attempt = 1;  // 1-based; retries resend the identical prompt
};

/// Sends one prompt and returns the model's raw text reply.
using Provider = std::function<std::string(const ProviderRequest& request)>;

/// Deterministic offline provider. For attempt k (1-based) it looks in
/// `fixtures` for, in order:
///   <model>.<k>.fail / <model>.fail  -> throws (contents "auth" => authentication, else transport)
///   <model>.<k>.txt  / <model>.txt   -> returned verbatim
/// and otherwise synthesizes a complete, valid answer for the requested scope
/// from a hash of (line, code).
[[nodiscard]] Provider make_mock_provider(std::filesystem::path fixtures);

/// OpenAI-style chat-completions endpoint; key sent as a bearer token.
[[nodiscard]] Provider make_chat_completions_provider(LlmProviderBinding binding);
/// Anthropic-style messages endpoint; key sent as x-api-key.
[[nodiscard]] Provider make_messages_provider(LlmProviderBinding binding);

/// "EDUCODER_LLM_<ID>_KEY" with the id upper-cased and non-alphanumerics
/// replaced by '_'.
[[nodiscard]] std::string api_key_env_name(std::string_view provider_id);

/// Resolves provider ids to callables. "mock" is always available; "openai"
/// and "anthropic" have default endpoints, overridable with
/// EDUCODER_LLM_<ID>_URL. Further ids are added with bind().
class ProviderRegistry {
 public:
  explicit ProviderRegistry(std::filesystem::path mock_fixtures = {});

  /// Adds or replaces a binding; `messages_api` picks the wire format.
  void bind(LlmProviderBinding binding, bool messages_api);
  /// Test hook: route an id to an arbitrary callable.
  void bind(const std::string& provider_id, Provider provider);

  /// Throws Error(invalidConfig) for an unknown id.
  [[nodiscard]] Provider resolve(const std::string& provider_id) const;
  [[nodiscard]] bool knows(const std::string& provider_id) const;

 private:
  std::filesystem::path mock_fixtures_;
  std::map<std::string, Provider> providers_;
};

}  // namespace educoder::llm
