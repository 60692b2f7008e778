#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "privcore/dataset.hpp"
#include "privcore/linear_model.hpp"

namespace privcore {

enum class HideMode { kNone, kHideValue, kPlant };

// Which column the plant residual is measured against. kSecret uses z;
// kLiteralPublic uses y.
enum class PlantLabel { kSecret, kLiteralPublic };

std::string_view hide_mode_name(HideMode mode);
std::optional<HideMode> parse_hide_mode(std::string_view name);
std::string_view plant_label_name(PlantLabel label);
std::optional<PlantLabel> parse_plant_label(std::string_view name);

struct HideConfig {
  HideMode mode = HideMode::kNone;
  double alpha = 1.0;
  std::optional<LinearModel> plant_model;
  PlantLabel plant_label = PlantLabel::kSecret;
  // Hide-value center; the sample mean of z when unset.
  std::optional<double> z_center;
};

// Subset of a parent dataset in canonical (strictly increasing) order.
struct CoreSet {
  std::string parent_fingerprint;
  std::vector<std::size_t> indices;

  std::size_t k() const { return indices.size(); }
  bool operator==(const CoreSet&) const = default;
};

// loss_i = (y_i - w.x_i - w0)^2 + alpha * h_i, where h_i is 0 (none),
// (z_i - z_center)^2 (hide-value) or (label_i - v.x_i - v0)^2 (plant).
// Rows are independent; jobs > 1 evaluates them on worker threads with
// results identical to the sequential pass.
std::vector<double> point_losses(const Dataset& data, const LinearModel& public_model,
                                 const HideConfig& hide, unsigned jobs = 1);

// The hide term h_i alone (without alpha).
std::vector<double> hide_terms(const Dataset& data, const HideConfig& hide);

// Indices of the k smallest losses, ties to the smaller index, sorted.
CoreSet select_bottom_k(std::span<const double> losses, std::size_t k,
                        std::string parent_fingerprint = {});

// Plant weights and intercept, i.i.d. N(0,1) from seed (weights first).
LinearModel make_plant(std::uint64_t seed, std::size_t d);

// k distinct rows of n drawn uniformly from derive_seed(seed, kSample).
CoreSet random_subset(std::size_t n, std::size_t k, std::uint64_t seed,
                      std::string parent_fingerprint = {});

// Size-k subset whose mean stays within mean_tolerance of the full sample
// mean while its spread is pushed outward. Greedy over the sorted deviations
// followed by a swap repair pass. Throws InfeasibleError carrying the best gap
// when the tolerance cannot be met.
CoreSet select_moment_coreset(std::span<const double> samples, std::size_t k,
                              double mean_tolerance);

struct MomentStats {
  double mean = 0.0;
  double variance = 0.0;  // population (divide by count)
};
MomentStats moments(std::span<const double> values);
MomentStats moments(std::span<const double> values, std::span<const std::size_t> subset);

}  // namespace privcore
