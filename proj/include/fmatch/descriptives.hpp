#ifndef FMATCH_DESCRIPTIVES_HPP
#define FMATCH_DESCRIPTIVES_HPP

#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "fmatch/data_model.hpp"

namespace fmatch {

struct DiffusionPoint {
  int year = 0;
  double share = 0.0;  // percent in [0, 100]
};

struct DiffusionSeries {
  std::set<std::string> villages;
  std::vector<DiffusionPoint> points;  // years strictly increasing
};

/// Share (percent) of the village's households whose first adoption year is
/// <= year. Households are counted once, whenever they appear in the
/// village. Throws Error{lookup} for an unknown village.
double diffusion_level(const PanelDataset& panel, const std::string& village,
                       int year);

/// Cumulative adopter share per year over the union of villages, one point
/// per year observed in those villages.
DiffusionSeries diffusion_series(const PanelDataset& panel,
                                 const std::set<std::string>& villages);

enum class AdopterCategory {
  innovator,
  early_adopter,
  early_majority,
  late_majority,
  laggard,
};

std::string_view to_string(AdopterCategory category);

/// Cumulative-share cut points; defaults are the cumulative Rogers
/// proportions.
struct CategoryThresholds {
  double innovator = 2.5;
  double early_adopter = 16.0;
  double early_majority = 50.0;
  double late_majority = 84.0;
};

/// Category from the cumulative diffusion share (percent) at adoption time.
/// Share must lie in (0, 100]; shares at a cut point belong to the earlier
/// category. Throws Error{domain} outside the range, Error{config} for
/// non-increasing cut points.
AdopterCategory adopter_category(double cumulative_share_at_adoption,
                                 const CategoryThresholds& thresholds = {});

/// 1 - sum of squared shares: the probability two random draws fall in
/// different groups. Shares must be non-negative and sum to 1 within 1e-9.
double fractionalization(const std::vector<double>& shares);

enum class CultureDimension { ethnicity, religion };

struct FractionalizationIndex {
  CultureDimension dimension = CultureDimension::ethnicity;
  double value = 0.0;  // in [0, 1)
};

/// Index over the households ever observed in the village (group attribute
/// taken from each household's first row).
FractionalizationIndex village_fractionalization(const PanelDataset& panel,
                                                 const std::string& village,
                                                 CultureDimension dimension);

struct HouseholdAdoption {
  std::string household_id;
  std::string village;
  int adoption_year = 0;
  double share_at_adoption = 0.0;  // diffusion level of the comparison set
  AdopterCategory category = AdopterCategory::innovator;
};

/// Adopters of the comparison set (village union) with the diffusion level
/// immediately after their own adoption and the resulting category.
std::vector<HouseholdAdoption> categorize_adopters(
    const PanelDataset& panel, const std::set<std::string>& villages,
    const CategoryThresholds& thresholds = {});

struct GroupComparisonRow {
  std::string variable;
  double mean_a = 0.0;
  double mean_b = 0.0;
  std::optional<double> p_value;  // absent for single-observation groups
  std::string note;
};

struct GroupComparison {
  std::string label_a;
  std::string label_b;
  std::size_t n_a = 0;
  std::size_t n_b = 0;
  std::vector<GroupComparisonRow> rows;
};

using ObservationPredicate = std::function<bool(const Observation&)>;

/// Per-variable group means with Welch p-values. Variables are numeric
/// covariate names plus the pseudo-variables "treated" and "outcome". A
/// year, when given, restricts the rows first. Throws
/// Error{degenerate_sample} when a group is empty; a single-observation
/// group reports means without p-values.
GroupComparison group_comparison(const PanelDataset& panel,
                                 const ObservationPredicate& in_group_a,
                                 const ObservationPredicate& in_group_b,
                                 const std::string& label_a,
                                 const std::string& label_b,
                                 const std::vector<std::string>& variables,
                                 std::optional<int> year = std::nullopt);

}  // namespace fmatch

#endif  // FMATCH_DESCRIPTIVES_HPP
