#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "educoder/core/model.hpp"
#include "educoder/irr/statistics.hpp"

namespace educoder::irr {

struct Unit {
  core::LineNumber line = 0;
  std::string code_id;

  friend bool operator==(const Unit&, const Unit&) = default;
};

/// units x raters grid of labels, row-major.
class RatingMatrix {
 public:
  RatingMatrix() = default;
  RatingMatrix(std::vector<Unit> units, std::vector<std::string> raters);

  [[nodiscard]] const std::vector<Unit>& units() const noexcept { return units_; }
  [[nodiscard]] const std::vector<std::string>& raters() const noexcept { return raters_; }
  [[nodiscard]] Label at(std::size_t unit, std::size_t rater) const { return labels_[unit * raters_.size() + rater]; }
  void set(std::size_t unit, std::size_t rater, Label l) { labels_[unit * raters_.size() + rater] = l; }

  [[nodiscard]] std::vector<Label> unit_labels(std::size_t unit) const;
  [[nodiscard]] std::vector<Label> rater_labels(std::size_t rater, std::span<const std::size_t> unit_indices) const;

  friend bool operator==(const RatingMatrix&, const RatingMatrix&) = default;

 private:
  std::vector<Unit> units_;
  std::vector<std::string> raters_;
  std::vector<Label> labels_;
};

/// One unit per (line, binary code), ordered by line then codebook order.
/// true -> present, false -> absent, unset or no cell -> missing. Cells of
/// raters not listed, and free-text codes, are ignored.
[[nodiscard]] RatingMatrix build_rating_matrix(std::span<const core::AnnotationCell> cells, const core::Codebook& codebook,
                                               std::span<const std::string> raters,
                                               std::span<const core::LineNumber> lines);

struct CodeAgreement {
  std::optional<double> kappa_pairwise_mean;
  std::optional<double> alpha;
  std::optional<double> percent_agreement;
  int n_units = 0;   // units with >= 2 non-missing labels
  int n_raters = 0;  // raters with >= 1 non-missing label

  friend bool operator==(const CodeAgreement&, const CodeAgreement&) = default;
};

struct CategoryAgreement {
  std::optional<double> alpha;
  std::optional<double> mean_kappa;

  friend bool operator==(const CategoryAgreement&, const CategoryAgreement&) = default;
};

struct Disagreement {
  core::LineNumber line = 0;
  std::string code_id;
  std::vector<std::pair<std::string, Label>> labels;  // rater order

  friend bool operator==(const Disagreement&, const Disagreement&) = default;
};

struct AgreementReport {
  std::vector<std::string> raters;
  std::vector<std::pair<std::string, CodeAgreement>> per_code;  // order of first unit
  std::vector<std::pair<std::string, CategoryAgreement>> per_category;
  std::optional<double> pooled_alpha;
  std::optional<double> mean_kappa;
  std::vector<std::string> low_agreement_codes;  // per_code order
  std::vector<Disagreement> disagreements;       // matrix unit order
  core::ProjectSettings settings;

  [[nodiscard]] const CodeAgreement* find(std::string_view code_id) const noexcept;

  friend bool operator==(const AgreementReport&, const AgreementReport&) = default;
};

/// Light's kappa (mean pairwise Cohen) per code, nominal alpha per code and
/// pooled, per-category figures when a codebook is supplied, low-agreement
/// codes and the disagreement list. Never throws on degenerate input.
[[nodiscard]] AgreementReport compute_agreement_report(const RatingMatrix& matrix, const core::ProjectSettings& settings,
                                                       const core::Codebook* codebook = nullptr);

}  // namespace educoder::irr
