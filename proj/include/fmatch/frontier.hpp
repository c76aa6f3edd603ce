#ifndef FMATCH_FRONTIER_HPP
#define FMATCH_FRONTIER_HPP

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <vector>

#include "fmatch/imbalance_metrics.hpp"
#include "fmatch/sample_builder.hpp"

namespace fmatch {

enum class MetricKind { l1, ami };

std::string_view to_string(MetricKind kind);

struct FrontierPoint {
  std::size_t pruned_count = 0;
  double imbalance = 0.0;
  std::size_t treated_remaining = 0;
  std::size_t control_remaining = 0;
  /// Units removed to reach this point from the previous one (greedy
  /// frontiers; empty for point 0).
  std::vector<std::uint32_t> removed_in_step;
  /// Full remaining set, used by the exhaustive oracle whose per-size
  /// subsets are not nested.
  std::vector<std::uint32_t> explicit_remaining;
};

struct Frontier {
  MetricKind metric_kind = MetricKind::l1;
  bool allow_treated_pruning = false;
  std::size_t original_size = 0;
  std::vector<FrontierPoint> points;

  /// Configuration snapshot: the binning actually used (L1) or the
  /// covariance model actually used (AMI).
  std::optional<BinningSpec> binning_snapshot;
  std::shared_ptr<const CovarianceModel> covariance_snapshot;

  /// Iterations where the imbalance rose after a removal. Possible only for
  /// the AMI frontier when treated pruning is disallowed; such points are
  /// still emitted and a warning is logged.
  std::uint32_t imbalance_increase_count = 0;
  bool explicit_points = false;

  /// Unit indexes (into the source sample) remaining at a point.
  std::vector<std::uint32_t> remaining_at(std::size_t point_index) const;
};

struct FrontierOptions {
  /// Sensitivity switches; both default to the fixed-geometry behaviour:
  /// bins are derived once on the unpruned sample, and the covariance is
  /// estimated once on the unpruned sample and held fixed.
  bool recoarsen_bins = false;
  bool reestimate_covariance = false;
};

/// Greedy L1 frontier. Starting from the full sample, repeatedly removes one
/// control unit from the stratum with the largest control-minus-treated
/// proportional surplus (ties by stratum signature, lexicographic); a
/// candidate removal is applied only when the post-removal L1 does not
/// exceed the current one. Stops when L1 reaches zero, when no removal
/// avoids an increase, or when controls would be exhausted. Treated units
/// are never pruned.
Frontier build_frontier_l1(const MatchingSample& sample,
                           const BinningSpec& spec,
                           const FrontierOptions& options = {});

/// Greedy AMI frontier. Each iteration removes every unit attaining the
/// maximum nearest-opposite distance (restricted to controls when
/// allow_treated_pruning is false), re-matches, and emits a point.
/// Terminates when the AMI is zero (within 1e-12), or when a removal would
/// empty a group or leave fewer than two units. Point 0 is the unpruned
/// sample.
Frontier build_frontier_ami(const MatchingSample& sample,
                            bool allow_treated_pruning,
                            std::shared_ptr<const CovarianceModel> cov,
                            const FrontierOptions& options = {});

struct BruteForceMetric {
  MetricKind kind = MetricKind::ami;
  BinningSpec spec;                            // L1
  std::shared_ptr<const CovarianceModel> cov;  // AMI
  bool allow_treated_pruning = false;          // AMI only; L1 never prunes treated

  static BruteForceMetric l1(BinningSpec spec);
  static BruteForceMetric ami(std::shared_ptr<const CovarianceModel> cov,
                              bool allow_treated_pruning);
};

/// Exhaustive verification oracle: for every subset size, enumerates all
/// subsets respecting the pruning constraint (both groups non-empty; treated
/// fixed where applicable) and records the minimum imbalance. Guarded by
/// max_n (default 12); larger samples raise Error{size_limit}.
Frontier brute_force_frontier(const MatchingSample& sample,
                              const BruteForceMetric& metric,
                              std::size_t max_n = 12);

/// CSV export: pruned_count, remaining_n, treated_n, control_n, imbalance.
void write_frontier_csv(std::ostream& out, const Frontier& frontier);

}  // namespace fmatch

#endif  // FMATCH_FRONTIER_HPP
