#pragma once
// Bearer-token principals. One administrator token per instance; annotator
// tokens are minted per annotator id and stay valid across projects.

#include <optional>
#include <string>
#include <string_view>

#include "educoder/store/store.hpp"

namespace educoder::api {

inline constexpr std::string_view kAdminId = "admin";

struct Principal {
  std::string annotator_id;
  store::Role role = store::Role::annotator;

  [[nodiscard]] bool is_admin() const noexcept { return role == store::Role::administrator; }
};

class Authenticator {
 public:
  /// An empty admin_token reuses the one persisted in the store, generating
  /// and persisting one on first start.
  Authenticator(store::Store& store, std::string admin_token = {});

  [[nodiscard]] const std::string& admin_token() const noexcept { return admin_token_; }
  /// From an "Authorization: Bearer <token>" header value.
  [[nodiscard]] std::optional<Principal> authenticate(std::string_view authorization) const;
  /// Returns the existing token for the annotator or mints a new one.
  std::string token_for(const std::string& annotator_id);

 private:
  store::Store& store_;
  std::string admin_token_;
};

}  // namespace educoder::api
