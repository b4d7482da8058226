#pragma once
// Nominal agreement statistics over present/absent labels with missing data.
//
// UNDEFINED results are std::nullopt. Functions throw Error(noOverlap) or
// Error(noPairableUnits) when there is nothing to compare at all.

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace educoder::irr {

enum class Label : std::uint8_t { missing, absent, present };

[[nodiscard]] std::string_view to_string(Label l) noexcept;

/// Fraction of equal labels over positions where both sides are non-missing.
[[nodiscard]] double percent_agreement(std::span<const Label> a, std::span<const Label> b);

/// Cohen's kappa with pairwise deletion of missing positions. nullopt when the
/// chance agreement p_e equals 1.
[[nodiscard]] std::optional<double> cohen_kappa(std::span<const Label> a, std::span<const Label> b);

/// Krippendorff's alpha (nominal) over units given as rows of rater labels.
/// Units with fewer than two non-missing labels contribute nothing. nullopt
/// when the expected disagreement is 0 (every pairable value identical).
[[nodiscard]] std::optional<double> krippendorff_alpha_nominal(std::span<const std::vector<Label>> units);

}  // namespace educoder::irr
