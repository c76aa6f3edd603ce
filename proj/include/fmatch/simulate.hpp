#ifndef FMATCH_SIMULATE_HPP
#define FMATCH_SIMULATE_HPP

#include <cstdint>

#include "fmatch/data_model.hpp"

namespace fmatch {

/// Synthetic panel model. Treatment in a year arrives with probability
/// sigmoid(treatment_base_logit + confounding * z_farm + confounding_age *
/// z_age), where z_farm and z_age are the household's standardized latent
/// farm size and age. First adoption happens with probability
/// clamp(adoption_base + adoption_slope * max(farm_size - 1, 0) +
/// true_effect * treated_now), a ramp in the observed farm size. Households
/// stop
/// appearing after their adoption year, so the raw panel already respects
/// the post-adoption removal convention; post-treatment rows are kept for
/// the sample builder to cut.
struct GeneratorConfig {
  int villages = 4;
  int households_per_village = 60;
  YearWindow years{1994, 2003};
  double true_effect = 0.5;
  double confounding = 1.2;        // logit slope of farm size on treatment
  double confounding_age = 0.0;    // logit slope of age on treatment
  double adoption_base = 0.05;
  double adoption_slope = 0.08;    // adoption probability per ha of farm size
  double treatment_base_logit = -3.0;
  std::uint64_t seed = 1;
};

/// Ten-covariate schema the generator emits (farm size, age, literacy, sex,
/// soil quality, market distance, shock, oxen, off-farm income, crop
/// variety).
CovariateSchema simulated_schema();

/// Seed-deterministic synthetic panel; identical config gives identical
/// datasets byte for byte.
PanelDataset simulate_panel(const GeneratorConfig& config);

}  // namespace fmatch

#endif  // FMATCH_SIMULATE_HPP
