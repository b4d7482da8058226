#include "educoder/llm/provider.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "educoder/codec/json_codec.hpp"
#include "educoder/core/error.hpp"
#include "httplib.h"

namespace educoder::llm {

namespace {

std::optional<std::string> read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string synthesize(const LlmRunConfig& config) {
  codec::Json arr = codec::Json::array();
  for (core::LineNumber line = config.line_range.start; line <= config.line_range.end; ++line) {
    for (const auto& code : config.features) {
      const bool present = (fnv1a(std::to_string(line) + "|" + code) & 1U) != 0;
      codec::Json e;
      e["line"] = line;
      e["code"] = code;
      e["present"] = present;
      e["rationale"] = present ? "mock: judged present" : "mock: judged absent";
      arr.push_back(std::move(e));
    }
  }
  return arr.dump();
}

struct Endpoint {
  std::string scheme_host_port;
  std::string path;
};

Endpoint split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  const auto path_start = url.find('/', scheme_end == std::string::npos ? 0 : scheme_end + 3);
  if (scheme_end == std::string::npos) throw Error(errc::invalid_config, "endpoint URL needs a scheme: " + url, "endpointUrl");
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

std::string read_key(const LlmProviderBinding& binding) {
  const char* key = std::getenv(binding.api_key_ref.c_str());
  if (key == nullptr || *key == '\0') {
    throw ProviderError(ProviderError::Kind::authentication, "environment variable " + binding.api_key_ref + " is not set");
  }
  return key;
}

std::string post_json(const LlmProviderBinding& binding, const httplib::Headers& headers, const codec::Json& body) {
  const Endpoint ep = split_url(binding.endpoint_url);
  httplib::Client client(ep.scheme_host_port);
  client.set_connection_timeout(binding.request_timeout_seconds, 0);
  client.set_read_timeout(binding.request_timeout_seconds, 0);
  client.set_write_timeout(binding.request_timeout_seconds, 0);
  auto res = client.Post(ep.path, headers, body.dump(), "application/json");
  if (!res) {
    throw ProviderError(ProviderError::Kind::transport,
                        binding.provider_id + ": request failed (" + httplib::to_string(res.error()) + ")");
  }
  if (res->status == 401 || res->status == 403) {
    throw ProviderError(ProviderError::Kind::authentication,
                        binding.provider_id + ": credentials rejected (HTTP " + std::to_string(res->status) + ")");
  }
  if (res->status < 200 || res->status >= 300) {
    throw ProviderError(ProviderError::Kind::transport,
                        binding.provider_id + ": HTTP " + std::to_string(res->status));
  }
  return res->body;
}

std::string upper_env_token(std::string_view id) {
  std::string out;
  for (unsigned char c : id) {
    if (c >= 'a' && c <= 'z') {
      out.push_back(static_cast<char>(c - 'a' + 'A'));
    } else if ((c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9')) {
      out.push_back(static_cast<char>(c));
    } else {
      out.push_back('_');
    }
  }
  return out;
}

}  // namespace

std::string api_key_env_name(std::string_view provider_id) {
  return "EDUCODER_LLM_" + upper_env_token(provider_id) + "_KEY";
}

Provider make_mock_provider(std::filesystem::path fixtures) {
  return [fixtures = std::move(fixtures)](const ProviderRequest& request) {
    const auto& config = request.config;
    if (!fixtures.empty()) {
      const std::string numbered = config.model + "." + std::to_string(request.attempt);
      for (const auto& stem : {numbered, config.model}) {
        if (auto fail = read_file(fixtures / (stem + ".fail"))) {
          const bool auth = fail->find("auth") != std::string::npos;
          throw ProviderError(auth ? ProviderError::Kind::authentication : ProviderError::Kind::transport,
                              "mock: scripted failure");
        }
        if (auto text = read_file(fixtures / (stem + ".txt"))) return *text;
      }
    }
    return synthesize(config);
  };
}

Provider make_chat_completions_provider(LlmProviderBinding binding) {
  return [binding = std::move(binding)](const ProviderRequest& request) {
    const std::string key = read_key(binding);
    const auto& config = request.config;
    const auto& prompt = request.prompt;
    codec::Json body;
    body["model"] = config.model;
    body["temperature"] = config.temperature;
    body["messages"] = codec::Json::array({codec::Json{{"role", "user"}, {"content", prompt}}});
    const std::string raw = post_json(binding, {{"Authorization", "Bearer " + key}}, body);
    const auto j = codec::Json::parse(raw, nullptr, false);
    try {
      return j.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const std::exception&) {
      // Not the expected envelope; hand the body to the parser as-is.
      return raw;
    }
  };
}

Provider make_messages_provider(LlmProviderBinding binding) {
  return [binding = std::move(binding)](const ProviderRequest& request) {
    const std::string key = read_key(binding);
    const auto& config = request.config;
    const auto& prompt = request.prompt;
    codec::Json body;
    body["model"] = config.model;
    body["max_tokens"] = 8192;
    body["temperature"] = config.temperature;
    body["messages"] = codec::Json::array({codec::Json{{"role", "user"}, {"content", prompt}}});
    const std::string raw =
        post_json(binding, {{"x-api-key", key}, {"anthropic-version", "2023-06-01"}}, body);
    const auto j = codec::Json::parse(raw, nullptr, false);
    try {
      std::string text;
      for (const auto& block : j.at("content")) {
        if (block.value("type", "") == "text") text += block.at("text").get<std::string>();
      }
      return text;
    } catch (const std::exception&) {
      return raw;
    }
  };
}

ProviderRegistry::ProviderRegistry(std::filesystem::path mock_fixtures) : mock_fixtures_(std::move(mock_fixtures)) {
  providers_["mock"] = make_mock_provider(mock_fixtures_);

  auto env = [](const std::string& name) -> std::optional<std::string> {
    const char* v = std::getenv(name.c_str());
    if (v == nullptr || *v == '\0') return std::nullopt;
    return std::string(v);
  };
  auto add = [&](const std::string& id, const std::string& default_url, bool messages_api) {
    const std::string token = upper_env_token(id);
    LlmProviderBinding b{id, env("EDUCODER_LLM_" + token + "_URL").value_or(default_url), api_key_env_name(id)};
    bind(std::move(b), messages_api);
  };
  add("openai", "https://api.openai.com/v1/chat/completions", false);
  add("anthropic", "https://api.anthropic.com/v1/messages", true);

}

void ProviderRegistry::bind(LlmProviderBinding binding, bool messages_api) {
  const std::string id = binding.provider_id;
  providers_[id] = messages_api ? make_messages_provider(std::move(binding))
                                : make_chat_completions_provider(std::move(binding));
}

void ProviderRegistry::bind(const std::string& provider_id, Provider provider) {
  providers_[provider_id] = std::move(provider);
}

bool ProviderRegistry::knows(const std::string& provider_id) const { return providers_.contains(provider_id); }

Provider ProviderRegistry::resolve(const std::string& provider_id) const {
  auto it = providers_.find(provider_id);
  if (it == providers_.end()) throw Error(errc::invalid_config, "unknown provider " + provider_id, "providerId");
  return it->second;
}

}  // namespace educoder::llm
