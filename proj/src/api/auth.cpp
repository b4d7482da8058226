#include "educoder/api/auth.hpp"

#include <openssl/crypto.h>

#include "educoder/core/ids.hpp"

namespace educoder::api {

namespace {

constexpr std::string_view kBearer = "Bearer ";

bool same_secret(std::string_view a, std::string_view b) {
  return a.size() == b.size() && CRYPTO_memcmp(a.data(), b.data(), a.size()) == 0;
}

}  // namespace

Authenticator::Authenticator(store::Store& store, std::string admin_token)
    : store_(store), admin_token_(std::move(admin_token)) {
  if (admin_token_.empty()) {
    if (auto stored = store_.meta("admin_token")) {
      admin_token_ = *stored;
    } else {
      admin_token_ = "adm-" + core::random_hex(24);
      store_.set_meta("admin_token", admin_token_);
    }
  }
}

std::optional<Principal> Authenticator::authenticate(std::string_view authorization) const {
  if (!authorization.starts_with(kBearer)) return std::nullopt;
  auto token = authorization.substr(kBearer.size());
  if (token.empty()) return std::nullopt;
  if (same_secret(token, admin_token_)) return Principal{std::string(kAdminId), store::Role::administrator};
  auto record = store_.find_token(std::string(token));
  if (!record) return std::nullopt;
  return Principal{record->annotator_id, record->role};
}

std::string Authenticator::token_for(const std::string& annotator_id) {
  if (auto existing = store_.token_for(annotator_id)) return *existing;
  auto token = "ann-" + core::random_hex(24);
  store_.put_token(token, {annotator_id, store::Role::annotator});
  return token;
}

}  // namespace educoder::api
