#ifndef FMATCH_IMBALANCE_METRICS_HPP
#define FMATCH_IMBALANCE_METRICS_HPP

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fmatch/sample_builder.hpp"

namespace fmatch {

/// Per-covariate coarsening rule for the multivariate histogram.
struct BinningRule {
  enum class Kind { distinct_values, quantile_bins, fixed_edges };
  Kind kind = Kind::distinct_values;
  int bins = 1;                // quantile_bins
  std::vector<double> edges;   // fixed_edges, strictly increasing
};

/// Coarsening plan covering every covariate of a sample schema, in schema
/// order. Default: binary columns keep their raw levels, continuous columns
/// get quantile bins with k = min(cap, distinct-value count). Quantiles use
/// the nearest-rank definition on the pooled sample.
struct BinningSpec {
  std::vector<BinningRule> rules;

  static BinningSpec default_for(const MatchingSample& sample, int cap = 10);
};

/// Multivariate histogram of a sample: per-stratum treated/control counts.
/// Strata are keyed by the per-covariate bin indices; the map ordering makes
/// lexicographic tie-breaking deterministic.
struct BinnedSample {
  std::map<std::vector<std::int32_t>, std::pair<std::int64_t, std::int64_t>>
      strata;  // signature -> (treated_count, control_count)
  std::int64_t total_treated = 0;
  std::int64_t total_control = 0;
};

/// Assigns every unit to exactly one stratum. A quantile rule on a column
/// with a single distinct value degenerates to one bin with a warning.
BinnedSample coarsen(const MatchingSample& sample, const BinningSpec& spec);

/// Per-unit stratum signatures (same assignment as coarsen), for callers
/// that re-tabulate counts over changing subsets.
std::vector<std::vector<std::int32_t>> bin_signatures(
    const MatchingSample& sample, const BinningSpec& spec);

/// Half the sum over strata of |treated share - control share|; 0 when the
/// group distributions coincide, 1 when their supports are disjoint.
double l1_imbalance(const BinnedSample& binned);

/// Pooled covariance of the covariate matrix with its inverse, after
/// dropping constant and exactly-collinear columns. If the retained matrix
/// is still not invertible to within 1e-8, a ridge of 1e-8 * trace(S)/d is
/// added (escalating tenfold as needed) and recorded.
struct CovarianceModel {
  Eigen::MatrixXd matrix;    // regularized covariance on retained columns
  Eigen::MatrixXd inverse;
  double ridge = 0.0;
  std::vector<std::size_t> dropped_columns;   // indices into the full schema
  std::vector<std::size_t> retained_columns;  // indices into the full schema
  std::size_t full_dimension = 0;

  /// Projects a full-dimension covariate vector onto the retained columns.
  Eigen::VectorXd project(const std::vector<double>& covariates) const;
};

/// Sample covariance over the pooled (treated + control) units, n-1
/// denominator. Throws Error{insufficient_data} for n < 2 and
/// Error{degenerate_sample} when every column is dropped.
CovarianceModel estimate_covariance(const MatchingSample& sample);

/// sqrt((x_i - x_j)' S^-1 (x_i - x_j)) on retained columns. Symmetric,
/// non-negative, zero iff the vectors agree on retained columns.
double mahalanobis(const std::vector<double>& x_i,
                   const std::vector<double>& x_j,
                   const CovarianceModel& cov);

/// Unit coordinates transformed so that Mahalanobis distance under cov
/// equals Euclidean distance between rows (centered for conditioning).
Eigen::MatrixXd whitened_coordinates(const MatchingSample& sample,
                                     const CovarianceModel& cov);

/// Every unit's distance to its nearest unit in the opposite treatment
/// group (argmin ties broken by lowest unit index). Index order follows
/// sample.units.
std::vector<double> nearest_opposite_distances(const MatchingSample& sample,
                                               const CovarianceModel& cov);

/// Average Mahalanobis Imbalance: the mean over all units of the nearest
/// opposite-group distance. Throws Error{degenerate_sample} when either
/// group is empty.
double ami(const MatchingSample& sample, const CovarianceModel& cov);

/// Covariance audit export (retained columns, ridge, dropped columns).
void write_covariance_csv(std::ostream& out, const CovarianceModel& cov,
                          const CovariateSchema& schema);

}  // namespace fmatch

#endif  // FMATCH_IMBALANCE_METRICS_HPP
