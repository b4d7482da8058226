#include "educoder/irr/report.hpp"

#include <algorithm>
#include <map>

#include "educoder/core/error.hpp"

namespace educoder::irr {

RatingMatrix::RatingMatrix(std::vector<Unit> units, std::vector<std::string> raters)
    : units_(std::move(units)), raters_(std::move(raters)), labels_(units_.size() * raters_.size(), Label::missing) {}

std::vector<Label> RatingMatrix::unit_labels(std::size_t unit) const {
  const auto begin = labels_.begin() + static_cast<std::ptrdiff_t>(unit * raters_.size());
  return {begin, begin + static_cast<std::ptrdiff_t>(raters_.size())};
}

std::vector<Label> RatingMatrix::rater_labels(std::size_t rater, std::span<const std::size_t> unit_indices) const {
  std::vector<Label> out;
  out.reserve(unit_indices.size());
  for (auto u : unit_indices) out.push_back(at(u, rater));
  return out;
}

RatingMatrix build_rating_matrix(std::span<const core::AnnotationCell> cells, const core::Codebook& codebook,
                                 std::span<const std::string> raters, std::span<const core::LineNumber> lines) {
  std::vector<Unit> units;
  std::map<std::pair<core::LineNumber, std::string>, std::size_t> unit_index;
  for (auto line : lines) {
    for (const auto& code : codebook.codes) {
      if (code.value_kind != core::ValueKind::binary) continue;
      unit_index.emplace(std::pair{line, code.code_id}, units.size());
      units.push_back({line, code.code_id});
    }
  }
  std::map<std::string, std::size_t, std::less<>> rater_index;
  for (std::size_t r = 0; r < raters.size(); ++r) rater_index.emplace(raters[r], r);

  RatingMatrix m(std::move(units), std::vector<std::string>(raters.begin(), raters.end()));
  for (const auto& cell : cells) {
    auto r = rater_index.find(cell.annotator);
    if (r == rater_index.end()) continue;
    auto u = unit_index.find({cell.line, cell.code_id});
    if (u == unit_index.end()) continue;
    if (const bool* v = std::get_if<bool>(&cell.value)) m.set(u->second, r->second, *v ? Label::present : Label::absent);
  }
  return m;
}

const CodeAgreement* AgreementReport::find(std::string_view code_id) const noexcept {
  for (const auto& [id, agreement] : per_code) {
    if (id == code_id) return &agreement;
  }
  return nullptr;
}

namespace {

std::optional<double> mean_of(const std::vector<double>& values) {
  if (values.empty()) return std::nullopt;
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

std::optional<double> alpha_or_undefined(const RatingMatrix& m, std::span<const std::size_t> unit_indices) {
  std::vector<std::vector<Label>> rows;
  rows.reserve(unit_indices.size());
  for (auto u : unit_indices) rows.push_back(m.unit_labels(u));
  try {
    return krippendorff_alpha_nominal(rows);
  } catch (const Error&) {
    return std::nullopt;
  }
}

CodeAgreement code_agreement(const RatingMatrix& m, std::span<const std::size_t> unit_indices) {
  CodeAgreement out;
  const std::size_t raters = m.raters().size();

  std::vector<std::vector<Label>> columns;
  columns.reserve(raters);
  for (std::size_t r = 0; r < raters; ++r) {
    columns.push_back(m.rater_labels(r, unit_indices));
    if (std::any_of(columns.back().begin(), columns.back().end(), [](Label l) { return l != Label::missing; })) {
      ++out.n_raters;
    }
  }

  std::vector<double> kappas;
  for (std::size_t i = 0; i < raters; ++i) {
    for (std::size_t j = i + 1; j < raters; ++j) {
      try {
        if (auto k = cohen_kappa(columns[i], columns[j])) kappas.push_back(*k);
      } catch (const Error&) {
        // no overlap: this pair contributes nothing
      }
    }
  }
  out.kappa_pairwise_mean = mean_of(kappas);

  std::size_t pairs = 0;
  std::size_t equal = 0;
  for (auto u : unit_indices) {
    const auto labels = m.unit_labels(u);
    std::size_t present = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (labels[i] == Label::missing) continue;
      ++present;
      for (std::size_t j = i + 1; j < labels.size(); ++j) {
        if (labels[j] == Label::missing) continue;
        ++pairs;
        if (labels[i] == labels[j]) ++equal;
      }
    }
    if (present >= 2) ++out.n_units;
  }
  if (pairs > 0) out.percent_agreement = static_cast<double>(equal) / static_cast<double>(pairs);
  out.alpha = alpha_or_undefined(m, unit_indices);
  return out;
}

}  // namespace

AgreementReport compute_agreement_report(const RatingMatrix& matrix, const core::ProjectSettings& settings,
                                         const core::Codebook* codebook) {
  AgreementReport report;
  report.raters = matrix.raters();
  report.settings = settings;

  std::vector<std::string> code_order;
  std::map<std::string, std::vector<std::size_t>> units_by_code;
  for (std::size_t u = 0; u < matrix.units().size(); ++u) {
    const auto& code = matrix.units()[u].code_id;
    auto [it, inserted] = units_by_code.try_emplace(code);
    if (inserted) code_order.push_back(code);
    it->second.push_back(u);
  }

  std::vector<double> code_kappas;
  for (const auto& code : code_order) {
    CodeAgreement ca = code_agreement(matrix, units_by_code[code]);
    if (ca.kappa_pairwise_mean) {
      code_kappas.push_back(*ca.kappa_pairwise_mean);
      if (*ca.kappa_pairwise_mean < settings.low_agreement_threshold) report.low_agreement_codes.push_back(code);
    }
    report.per_code.emplace_back(code, ca);
  }
  report.mean_kappa = mean_of(code_kappas);

  std::vector<std::size_t> all_units(matrix.units().size());
  for (std::size_t u = 0; u < all_units.size(); ++u) all_units[u] = u;
  report.pooled_alpha = alpha_or_undefined(matrix, all_units);

  if (codebook != nullptr) {
    for (const auto& category : codebook->categories()) {
      std::vector<std::size_t> units;
      std::vector<double> kappas;
      for (const auto& [code, agreement] : report.per_code) {
        const auto* def = codebook->find(code);
        if (def == nullptr || def->category != category) continue;
        const auto& idx = units_by_code[code];
        units.insert(units.end(), idx.begin(), idx.end());
        if (agreement.kappa_pairwise_mean) kappas.push_back(*agreement.kappa_pairwise_mean);
      }
      if (units.empty()) continue;
      std::sort(units.begin(), units.end());
      report.per_category.emplace_back(category, CategoryAgreement{alpha_or_undefined(matrix, units), mean_of(kappas)});
    }
  }

  for (std::size_t u = 0; u < matrix.units().size(); ++u) {
    const auto labels = matrix.unit_labels(u);
    std::optional<Label> first;
    bool differs = false;
    for (Label l : labels) {
      if (l == Label::missing) continue;
      if (!first) {
        first = l;
      } else if (*first != l) {
        differs = true;
      }
    }
    if (!differs) continue;
    Disagreement d{matrix.units()[u].line, matrix.units()[u].code_id, {}};
    for (std::size_t r = 0; r < labels.size(); ++r) d.labels.emplace_back(matrix.raters()[r], labels[r]);
    report.disagreements.push_back(std::move(d));
  }
  return report;
}

}  // namespace educoder::irr
