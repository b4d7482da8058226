#include "educoder/core/slug.hpp"

#include "educoder/core/error.hpp"

namespace educoder::core {

namespace {
bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }
bool is_alnum_ascii(unsigned char c) {
  return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}
}  // namespace

std::string trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return std::string(s);
}

std::string to_lower_ascii(std::string_view s) {
  std::string out(s);
  for (auto& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

std::string make_code_slug(std::string_view name) {
  const std::string trimmed = trim(name);
  if (trimmed.empty()) throw Error(errc::validation, "code name is empty", "code");
  std::string out;
  bool pending_hyphen = false;
  for (unsigned char c : trimmed) {
    if (is_alnum_ascii(c) || c >= 0x80) {
      if (pending_hyphen && !out.empty()) out.push_back('-');
      pending_hyphen = false;
      out.push_back(c >= 'A' && c <= 'Z' ? static_cast<char>(c - 'A' + 'a') : static_cast<char>(c));
    } else {
      pending_hyphen = true;
    }
  }
  if (out.empty()) out = "code";
  return out;
}

std::string make_code_slug(std::string_view name, const std::set<std::string>& taken) {
  const std::string base = make_code_slug(name);
  if (!taken.contains(base)) return base;
  for (int n = 2;; ++n) {
    std::string candidate = base + "-" + std::to_string(n);
    if (!taken.contains(candidate)) return candidate;
  }
}

}  // namespace educoder::core
