#include "fmatch/descriptives.hpp"

#include <algorithm>
#include <limits>
#include <map>

#include "fmatch/errors.hpp"
#include "fmatch/estimation.hpp"

namespace fmatch {

namespace {

constexpr int kNoYear = std::numeric_limits<int>::max();

struct VillageRoster {
  std::set<std::string> households;
  std::set<int> years;
};

std::map<std::string, int> first_adoption_years(const PanelDataset& panel) {
  std::map<std::string, int> adoption;
  for (const auto& row : panel.rows) {
    if (!row.outcome) continue;
    auto [it, inserted] = adoption.emplace(row.household_id, row.year);
    if (!inserted && row.year < it->second) it->second = row.year;
  }
  return adoption;
}

std::map<std::string, VillageRoster> village_rosters(const PanelDataset& panel) {
  std::map<std::string, VillageRoster> rosters;
  for (const auto& row : panel.rows) {
    auto& roster = rosters[row.village];
    roster.households.insert(row.household_id);
    roster.years.insert(row.year);
  }
  return rosters;
}

double share_adopted_by(const std::set<std::string>& households,
                        const std::map<std::string, int>& adoption, int year) {
  std::size_t adopted = 0;
  for (const auto& household : households) {
    const auto it = adoption.find(household);
    if (it != adoption.end() && it->second <= year) ++adopted;
  }
  return 100.0 * static_cast<double>(adopted) /
         static_cast<double>(households.size());
}

}  // namespace

double diffusion_level(const PanelDataset& panel, const std::string& village,
                       int year) {
  const auto rosters = village_rosters(panel);
  const auto it = rosters.find(village);
  if (it == rosters.end()) {
    throw Error(Error::Kind::lookup, "unknown village '" + village + "'");
  }
  return share_adopted_by(it->second.households, first_adoption_years(panel),
                          year);
}

DiffusionSeries diffusion_series(const PanelDataset& panel,
                                 const std::set<std::string>& villages) {
  if (villages.empty()) {
    throw Error(Error::Kind::config, "diffusion series needs villages");
  }
  const auto rosters = village_rosters(panel);
  std::set<std::string> households;
  std::set<int> years;
  for (const auto& village : villages) {
    const auto it = rosters.find(village);
    if (it == rosters.end()) {
      throw Error(Error::Kind::lookup, "unknown village '" + village + "'");
    }
    households.insert(it->second.households.begin(),
                      it->second.households.end());
    years.insert(it->second.years.begin(), it->second.years.end());
  }

  const auto adoption = first_adoption_years(panel);
  DiffusionSeries series;
  series.villages = villages;
  for (const int year : years) {
    series.points.push_back({year, share_adopted_by(households, adoption, year)});
  }
  return series;
}

std::string_view to_string(AdopterCategory category) {
  switch (category) {
    case AdopterCategory::innovator: return "innovator";
    case AdopterCategory::early_adopter: return "early_adopter";
    case AdopterCategory::early_majority: return "early_majority";
    case AdopterCategory::late_majority: return "late_majority";
    case AdopterCategory::laggard: return "laggard";
  }
  return "laggard";
}

AdopterCategory adopter_category(double share,
                                 const CategoryThresholds& thresholds) {
  const double cuts[4] = {thresholds.innovator, thresholds.early_adopter,
                          thresholds.early_majority, thresholds.late_majority};
  for (int i = 0; i < 4; ++i) {
    if (cuts[i] <= 0.0 || cuts[i] >= 100.0 || (i > 0 && cuts[i] <= cuts[i - 1])) {
      throw Error(Error::Kind::config,
                  "category cut points must be strictly increasing in (0, 100)");
    }
  }
  if (!(share > 0.0) || share > 100.0) {
    throw Error(Error::Kind::domain,
                "cumulative share must lie in (0, 100], got " +
                    std::to_string(share));
  }
  if (share <= thresholds.innovator) return AdopterCategory::innovator;
  if (share <= thresholds.early_adopter) return AdopterCategory::early_adopter;
  if (share <= thresholds.early_majority) return AdopterCategory::early_majority;
  if (share <= thresholds.late_majority) return AdopterCategory::late_majority;
  return AdopterCategory::laggard;
}

double fractionalization(const std::vector<double>& shares) {
  double sum = 0.0;
  double sum_squares = 0.0;
  for (const double share : shares) {
    if (share < 0.0) {
      throw Error(Error::Kind::normalization, "shares must be non-negative");
    }
    sum += share;
    sum_squares += share * share;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw Error(Error::Kind::normalization,
                "shares sum to " + std::to_string(sum) + ", expected 1");
  }
  return 1.0 - sum_squares;
}

FractionalizationIndex village_fractionalization(const PanelDataset& panel,
                                                 const std::string& village,
                                                 CultureDimension dimension) {
  std::map<std::string, std::string> household_group;
  for (const auto& row : panel.rows) {
    if (row.village != village) continue;
    const std::string& group =
        dimension == CultureDimension::ethnicity ? row.ethnicity : row.religion;
    household_group.emplace(row.household_id, group);
  }
  if (household_group.empty()) {
    throw Error(Error::Kind::lookup, "unknown village '" + village + "'");
  }
  std::map<std::string, std::size_t> counts;
  for (const auto& [household, group] : household_group) ++counts[group];
  std::vector<double> shares;
  shares.reserve(counts.size());
  for (const auto& [group, count] : counts) {
    shares.push_back(static_cast<double>(count) /
                     static_cast<double>(household_group.size()));
  }
  return {dimension, fractionalization(shares)};
}

std::vector<HouseholdAdoption> categorize_adopters(
    const PanelDataset& panel, const std::set<std::string>& villages,
    const CategoryThresholds& thresholds) {
  const auto rosters = village_rosters(panel);
  std::set<std::string> households;
  for (const auto& village : villages) {
    const auto it = rosters.find(village);
    if (it == rosters.end()) {
      throw Error(Error::Kind::lookup, "unknown village '" + village + "'");
    }
    households.insert(it->second.households.begin(),
                      it->second.households.end());
  }
  const auto adoption = first_adoption_years(panel);

  std::map<std::string, std::string> household_village;
  for (const auto& row : panel.rows) {
    household_village.emplace(row.household_id, row.village);
  }

  std::vector<HouseholdAdoption> adopters;
  for (const auto& [household, year] : adoption) {
    if (!households.contains(household)) continue;
    HouseholdAdoption entry;
    entry.household_id = household;
    entry.village = household_village[household];
    entry.adoption_year = year;
    // The comparison-set diffusion level immediately after this adoption,
    // the household's own adoption included.
    entry.share_at_adoption = share_adopted_by(households, adoption, year);
    entry.category = adopter_category(entry.share_at_adoption, thresholds);
    adopters.push_back(std::move(entry));
  }
  std::sort(adopters.begin(), adopters.end(),
            [](const HouseholdAdoption& a, const HouseholdAdoption& b) {
              if (a.adoption_year != b.adoption_year) {
                return a.adoption_year < b.adoption_year;
              }
              return a.household_id < b.household_id;
            });
  return adopters;
}

GroupComparison group_comparison(const PanelDataset& panel,
                                 const ObservationPredicate& in_group_a,
                                 const ObservationPredicate& in_group_b,
                                 const std::string& label_a,
                                 const std::string& label_b,
                                 const std::vector<std::string>& variables,
                                 std::optional<int> year) {
  std::vector<const Observation*> group_a;
  std::vector<const Observation*> group_b;
  for (const auto& row : panel.rows) {
    if (year.has_value() && row.year != *year) continue;
    if (in_group_a(row)) group_a.push_back(&row);
    if (in_group_b(row)) group_b.push_back(&row);
  }
  if (group_a.empty() || group_b.empty()) {
    throw Error(Error::Kind::degenerate_sample,
                "group comparison needs both groups non-empty");
  }

  const auto extract = [&](const Observation& row,
                           const std::string& variable) -> double {
    if (variable == "treated") return row.treated ? 1.0 : 0.0;
    if (variable == "outcome") return row.outcome ? 1.0 : 0.0;
    const auto index = panel.schema.index_of(variable);
    if (!index.has_value()) {
      throw Error(Error::Kind::lookup,
                  "unknown variable '" + variable + "'");
    }
    if (panel.schema.at(*index).kind == CovariateKind::categorical) {
      throw Error(Error::Kind::domain,
                  "variable '" + variable + "' is categorical; comparisons "
                  "need numeric variables");
    }
    return std::get<double>(row.covariates[*index]);
  };

  GroupComparison comparison;
  comparison.label_a = label_a;
  comparison.label_b = label_b;
  comparison.n_a = group_a.size();
  comparison.n_b = group_b.size();

  for (const auto& variable : variables) {
    std::vector<double> values_a;
    std::vector<double> values_b;
    values_a.reserve(group_a.size());
    values_b.reserve(group_b.size());
    for (const auto* row : group_a) values_a.push_back(extract(*row, variable));
    for (const auto* row : group_b) values_b.push_back(extract(*row, variable));

    GroupComparisonRow row;
    row.variable = variable;
    double sum_a = 0.0;
    for (const double v : values_a) sum_a += v;
    double sum_b = 0.0;
    for (const double v : values_b) sum_b += v;
    row.mean_a = sum_a / static_cast<double>(values_a.size());
    row.mean_b = sum_b / static_cast<double>(values_b.size());

    if (values_a.size() < 2 || values_b.size() < 2) {
      row.note = "only one observation in a group; test omitted";
    } else {
      row.p_value = mean_difference_test(values_a, values_b);
    }
    comparison.rows.push_back(std::move(row));
  }
  return comparison;
}

}  // namespace fmatch
