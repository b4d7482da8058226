#include "educoder/irr/statistics.hpp"

#include <array>

#include "educoder/core/error.hpp"

namespace educoder::irr {

namespace {

constexpr std::size_t kCategories = 3;  // indexed by Label; slot 0 (missing) stays empty

void require_equal_length(std::span<const Label> a, std::span<const Label> b) {
  if (a.size() != b.size()) throw Error(errc::validation, "label sequences differ in length");
}

}  // namespace

std::string_view to_string(Label l) noexcept {
  switch (l) {
    case Label::missing: return "missing";
    case Label::absent: return "absent";
    case Label::present: return "present";
  }
  return "missing";
}

double percent_agreement(std::span<const Label> a, std::span<const Label> b) {
  require_equal_length(a, b);
  std::size_t pairs = 0;
  std::size_t equal = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == Label::missing || b[i] == Label::missing) continue;
    ++pairs;
    if (a[i] == b[i]) ++equal;
  }
  if (pairs == 0) throw Error(errc::no_overlap, "no position is labelled by both raters");
  return static_cast<double>(equal) / static_cast<double>(pairs);
}

std::optional<double> cohen_kappa(std::span<const Label> a, std::span<const Label> b) {
  require_equal_length(a, b);
  std::array<std::size_t, kCategories> count_a{};
  std::array<std::size_t, kCategories> count_b{};
  std::size_t n = 0;
  std::size_t equal = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == Label::missing || b[i] == Label::missing) continue;
    ++n;
    ++count_a[static_cast<std::size_t>(a[i])];
    ++count_b[static_cast<std::size_t>(b[i])];
    if (a[i] == b[i]) ++equal;
  }
  if (n == 0) throw Error(errc::no_overlap, "no position is labelled by both raters");

  const double nn = static_cast<double>(n);
  const double p_o = static_cast<double>(equal) / nn;
  // Sum of integer products first keeps p_e exact up to the final division.
  std::size_t marginal_products = 0;
  for (std::size_t c = 0; c < kCategories; ++c) marginal_products += count_a[c] * count_b[c];
  if (marginal_products == n * n) return std::nullopt;
  const double p_e = static_cast<double>(marginal_products) / (nn * nn);
  return (p_o - p_e) / (1.0 - p_e);
}

std::optional<double> krippendorff_alpha_nominal(std::span<const std::vector<Label>> units) {
  // Coincidence matrix o[c][k].
  std::array<std::array<double, kCategories>, kCategories> o{};
  bool any_pairable = false;
  for (const auto& unit : units) {
    std::array<std::size_t, kCategories> counts{};
    std::size_t m = 0;
    for (Label l : unit) {
      if (l == Label::missing) continue;
      ++counts[static_cast<std::size_t>(l)];
      ++m;
    }
    if (m < 2) continue;
    any_pairable = true;
    const double weight = 1.0 / static_cast<double>(m - 1);
    for (std::size_t c = 1; c < kCategories; ++c) {
      for (std::size_t k = 1; k < kCategories; ++k) {
        const double pairs = c == k ? static_cast<double>(counts[c]) * static_cast<double>(counts[c] - (counts[c] ? 1 : 0))
                                    : static_cast<double>(counts[c]) * static_cast<double>(counts[k]);
        o[c][k] += pairs * weight;
      }
    }
  }
  if (!any_pairable) throw Error(errc::no_pairable_units, "no unit has two or more labels");

  std::array<double, kCategories> n_c{};
  double n = 0.0;
  double observed_off_diagonal = 0.0;
  for (std::size_t c = 1; c < kCategories; ++c) {
    for (std::size_t k = 1; k < kCategories; ++k) {
      n_c[c] += o[c][k];
      if (c != k) observed_off_diagonal += o[c][k];
    }
    n += n_c[c];
  }
  double expected_off_diagonal = 0.0;
  for (std::size_t c = 1; c < kCategories; ++c) {
    for (std::size_t k = 1; k < kCategories; ++k) {
      if (c != k) expected_off_diagonal += n_c[c] * n_c[k];
    }
  }
  if (expected_off_diagonal == 0.0) return std::nullopt;
  const double d_o = observed_off_diagonal / n;
  const double d_e = expected_off_diagonal / (n * (n - 1.0));
  return 1.0 - d_o / d_e;
}

}  // namespace educoder::irr
