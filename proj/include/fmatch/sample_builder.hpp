#ifndef FMATCH_SAMPLE_BUILDER_HPP
#define FMATCH_SAMPLE_BUILDER_HPP

#include <cstdint>
#include <iosfwd>
#include <set>
#include <string>
#include <vector>

#include "fmatch/data_model.hpp"

namespace fmatch {

struct SampleUnit {
  std::string unit_id;  // household id
  int year = 0;
  std::string village;
  bool treated = false;
  bool outcome = false;
  std::vector<double> covariates;  // fully numeric, categoricals one-hot

  bool operator==(const SampleUnit&) const = default;
};

enum class Provenance { full_pooling, partial_pooling, subset };

std::string_view to_string(Provenance provenance);

/// Treated/control partition of household-year units, the object the
/// frontier prunes. Covariates are numeric; categorical panel covariates are
/// expanded to one indicator column per observed level ("name=level").
struct MatchingSample {
  CovariateSchema schema;
  std::vector<SampleUnit> units;
  Provenance provenance = Provenance::full_pooling;
  std::string provenance_note;
  /// Treated count of the sample this one was pruned from; equal to the own
  /// treated count for builder output. Drives the SATT/FSATT label.
  std::size_t source_treated_count = 0;

  std::size_t treated_count() const;
  std::size_t control_count() const;
};

/// Year-wise treated/control assignment settings. Removal of units after
/// their first treatment and after adoption is fixed behaviour, not a knob:
/// every unit may appear as treated at most once, in its first treatment
/// year, and never after its first adoption.
struct PoolingConfig {
  YearWindow study_window;
  std::set<int> survey_years;
  std::vector<std::string> covariate_subset;

  static constexpr bool drop_after_treatment = true;
  static constexpr bool drop_after_adoption = true;
};

/// One unit per household-year over the whole window: never-treated
/// households until adoption or exit, eventually-treated households as
/// control strictly before the first treatment year and as treated exactly
/// in it. Throws Error{rule_violation} if a household is recorded treated
/// before the window opens, Error{degenerate_sample} when either group ends
/// up empty.
MatchingSample build_full_pooling(const PanelDataset& panel,
                                  const PoolingConfig& config);

/// Same assignment rules restricted to survey years. Households treated in a
/// non-survey year contribute no treated row; their pre-treatment control
/// rows in survey years are kept.
MatchingSample build_partial_pooling(const PanelDataset& panel,
                                     const PoolingConfig& config);

struct SampleFilter {
  enum class Kind { year, village };
  Kind kind = Kind::year;
  int year = 0;
  std::string village;

  static SampleFilter by_year(int year);
  static SampleFilter by_village(std::string village);
  std::string describe() const;
};

/// Units satisfying the predicate; provenance updated. The result is its own
/// analysis universe, so the SATT/FSATT baseline resets to the subset.
/// Throws Error{degenerate_sample} when the filter empties either group and
/// Error{lookup} when the filter value is absent from the sample.
MatchingSample subset_by(const MatchingSample& sample,
                         const SampleFilter& filter);

/// The sample restricted to the given unit indexes (sorted). Keeps the
/// source treated count, so estimates on frontier subsets can tell whether
/// treated units were pruned.
MatchingSample restrict_to_units(const MatchingSample& sample,
                                 const std::vector<std::uint32_t>& keep);

/// CSV export with a provenance header comment.
void write_sample_csv(std::ostream& out, const MatchingSample& sample);

}  // namespace fmatch

#endif  // FMATCH_SAMPLE_BUILDER_HPP
