#ifndef FMATCH_ESTIMATION_HPP
#define FMATCH_ESTIMATION_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fmatch/frontier.hpp"
#include "fmatch/sample_builder.hpp"

namespace fmatch {

enum class Estimand { satt, fsatt };

std::string_view to_string(Estimand estimand);

struct AttEstimate {
  double att = 0.0;        // mean(outcome | treated) - mean(outcome | control)
  double std_error = 0.0;  // sqrt(pt qt / nt + pc qc / nc)
  std::size_t n_total = 0;
  std::size_t n_treated = 0;
  std::size_t n_control = 0;
  Estimand estimand = Estimand::satt;  // fsatt when treated units were pruned
};

/// Difference in outcome proportions on the subset. Throws
/// Error{degenerate_sample} when either group is empty.
AttEstimate estimate_att(const MatchingSample& subset);

/// Nonparametric alternative standard error: within-group resampling of the
/// outcome flags, seed-deterministic.
double bootstrap_std_error(const MatchingSample& subset, int replicates,
                           std::uint64_t seed);

/// Two-sided Welch unequal-variance t-test p-value. Conventions: both lists
/// constant with equal means -> 1; both constant with different means -> 0
/// (exact separation). Throws Error{insufficient_data} for lists shorter
/// than 2.
double mean_difference_test(const std::vector<double>& values_a,
                            const std::vector<double>& values_b);

/// Normal-approximation p-value for att != 0 and the matching significance
/// marks at the 0.1 / 0.05 / 0.01 thresholds.
double att_p_value(const AttEstimate& estimate);
std::string significance_stars(double p_value);

struct BalanceRow {
  std::string covariate;
  double mean_control = 0.0;
  double mean_treated = 0.0;
  std::optional<double> p_value;  // absent when a group is too small to test
  std::string note;
};

struct BalanceReport {
  std::vector<BalanceRow> rows;
  double alpha = 0.10;
  bool balanced = false;  // every row has a p-value and all exceed alpha
};

/// One row per covariate: group means plus the Welch p-value. A covariate
/// constant in both groups at the same value reports p = 1 with a note.
BalanceReport balance_report(const MatchingSample& subset, double alpha);

struct BalancedSelection {
  std::size_t point_index = 0;
  FrontierPoint point;
  bool balanced = false;
  BalanceReport report;
};

/// The frontier point with the largest remaining sample whose balance
/// report is balanced at alpha; when none is, the minimum-imbalance point
/// flagged unbalanced.
BalancedSelection select_balanced_subset(const Frontier& frontier,
                                         const MatchingSample& sample,
                                         double alpha);

/// estimate_att at every frontier point; degenerate points become gaps.
std::vector<std::pair<std::size_t, std::optional<AttEstimate>>>
att_along_frontier(const Frontier& frontier, const MatchingSample& sample);

}  // namespace fmatch

#endif  // FMATCH_ESTIMATION_HPP
