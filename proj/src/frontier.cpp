#include "fmatch/frontier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <ostream>
#include <utility>

#include "fmatch/csv.hpp"
#include "fmatch/errors.hpp"
#include "fmatch/log.hpp"

namespace fmatch {

namespace {

constexpr double kZeroTolerance = 1e-12;

void require_non_degenerate(const MatchingSample& sample) {
  const std::size_t treated = sample.treated_count();
  if (treated == 0 || treated == sample.units.size()) {
    throw Error(Error::Kind::degenerate_sample,
                "frontier construction needs both treated and control units");
  }
}

bool increased(double current, double previous) {
  return current > previous + kZeroTolerance * (1.0 + std::abs(previous));
}

}  // namespace

std::string_view to_string(MetricKind kind) {
  return kind == MetricKind::l1 ? "l1" : "ami";
}

std::vector<std::uint32_t> Frontier::remaining_at(
    std::size_t point_index) const {
  const auto& point = points.at(point_index);
  if (explicit_points) return point.explicit_remaining;

  std::vector<bool> alive(original_size, true);
  for (std::size_t p = 0; p <= point_index; ++p) {
    for (const auto unit : points[p].removed_in_step) alive[unit] = false;
  }
  std::vector<std::uint32_t> remaining;
  remaining.reserve(original_size - point.pruned_count);
  for (std::uint32_t i = 0; i < original_size; ++i) {
    if (alive[i]) remaining.push_back(i);
  }
  return remaining;
}

// ---------------------------------------------------------------------------
// L1 frontier

namespace {

struct Stratum {
  std::int64_t treated = 0;
  std::int64_t control = 0;
  std::vector<std::uint32_t> control_units;  // ascending
  std::size_t next_control = 0;              // removal cursor
};

using StrataMap = std::map<std::vector<std::int32_t>, Stratum>;

StrataMap tabulate(const MatchingSample& sample,
                   const std::vector<std::vector<std::int32_t>>& signatures,
                   const std::vector<bool>& alive) {
  StrataMap strata;
  for (std::size_t i = 0; i < sample.units.size(); ++i) {
    if (!alive[i]) continue;
    auto& stratum = strata[signatures[i]];
    if (sample.units[i].treated) {
      ++stratum.treated;
    } else {
      ++stratum.control;
      stratum.control_units.push_back(static_cast<std::uint32_t>(i));
    }
  }
  return strata;
}

double l1_of(const StrataMap& strata, double total_treated,
             double total_control, const StrataMap::const_iterator& adjusted,
             std::int64_t control_delta) {
  double sum = 0.0;
  for (auto it = strata.begin(); it != strata.end(); ++it) {
    const double t = static_cast<double>(it->second.treated) / total_treated;
    const std::int64_t control_count =
        it->second.control + (it == adjusted ? control_delta : 0);
    const double c = static_cast<double>(control_count) / total_control;
    sum += std::abs(t - c);
  }
  return 0.5 * sum;
}

/// One greedy L1 step over the given strata. Returns the removed unit and
/// the post-removal L1, or nothing when no removal avoids an increase.
struct L1Step {
  std::uint32_t removed_unit = 0;
  StrataMap::iterator stratum;
  double l1_after = 0.0;
};

std::optional<L1Step> l1_greedy_step(StrataMap& strata, double total_treated,
                                     std::int64_t total_control,
                                     double l1_current) {
  if (total_control <= 1) return std::nullopt;

  // Candidate strata ordered by control-minus-treated surplus, largest
  // first; the map order makes ties lexicographic in the signature.
  std::vector<std::pair<double, StrataMap::iterator>> candidates;
  for (auto it = strata.begin(); it != strata.end(); ++it) {
    if (it->second.next_control >= it->second.control_units.size()) continue;
    const double surplus =
        static_cast<double>(it->second.control) /
            static_cast<double>(total_control) -
        static_cast<double>(it->second.treated) / total_treated;
    candidates.emplace_back(surplus, it);
  }
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });

  for (auto& [surplus, it] : candidates) {
    const double l1_after = l1_of(strata, total_treated,
                                  static_cast<double>(total_control - 1), it,
                                  /*control_delta=*/-1);
    if (l1_after <= l1_current) {
      L1Step step;
      step.stratum = it;
      step.removed_unit = it->second.control_units[it->second.next_control];
      step.l1_after = l1_after;
      return step;
    }
  }
  return std::nullopt;
}

Frontier build_frontier_l1_fixed(const MatchingSample& sample,
                                 const BinningSpec& spec) {
  const auto signatures = bin_signatures(sample, spec);
  std::vector<bool> alive(sample.units.size(), true);
  StrataMap strata = tabulate(sample, signatures, alive);

  std::int64_t total_treated = 0;
  std::int64_t total_control = 0;
  for (const auto& [signature, stratum] : strata) {
    total_treated += stratum.treated;
    total_control += stratum.control;
  }

  Frontier frontier;
  frontier.metric_kind = MetricKind::l1;
  frontier.allow_treated_pruning = false;
  frontier.original_size = sample.units.size();
  frontier.binning_snapshot = spec;

  const double treated_total = static_cast<double>(total_treated);
  double l1_current = l1_of(strata, treated_total,
                            static_cast<double>(total_control), strata.end(), 0);
  frontier.points.push_back({0, l1_current,
                             static_cast<std::size_t>(total_treated),
                             static_cast<std::size_t>(total_control),
                             {},
                             {}});

  std::size_t pruned = 0;
  while (l1_current > kZeroTolerance) {
    auto step = l1_greedy_step(strata, treated_total, total_control, l1_current);
    if (!step.has_value()) break;

    auto& stratum = step->stratum->second;
    --stratum.control;
    ++stratum.next_control;
    --total_control;
    ++pruned;
    l1_current = step->l1_after;

    frontier.points.push_back({pruned, l1_current,
                               static_cast<std::size_t>(total_treated),
                               static_cast<std::size_t>(total_control),
                               {step->removed_unit},
                               {}});
  }
  return frontier;
}

/// Sensitivity path: quantile edges and levels re-derived on the pruned
/// subset before every removal. Imbalance is measured under the binning
/// current at that step, so the emitted sequence may rise; any rise is
/// counted and logged like the AMI relaxation.
Frontier build_frontier_l1_recoarsen(const MatchingSample& sample,
                                     const BinningSpec& spec) {
  Frontier frontier;
  frontier.metric_kind = MetricKind::l1;
  frontier.allow_treated_pruning = false;
  frontier.original_size = sample.units.size();
  frontier.binning_snapshot = spec;

  std::vector<bool> alive(sample.units.size(), true);
  std::vector<std::uint32_t> alive_list(sample.units.size());
  for (std::uint32_t i = 0; i < alive_list.size(); ++i) alive_list[i] = i;

  bool first = true;
  std::size_t pruned = 0;
  double previous = 0.0;
  while (true) {
    const MatchingSample current = restrict_to_units(sample, alive_list);
    const auto signatures = bin_signatures(current, spec);
    std::vector<bool> all(current.units.size(), true);
    StrataMap strata = tabulate(current, signatures, all);

    std::int64_t total_treated = 0;
    std::int64_t total_control = 0;
    for (const auto& [signature, stratum] : strata) {
      total_treated += stratum.treated;
      total_control += stratum.control;
    }
    const double treated_total = static_cast<double>(total_treated);
    const double l1_now = l1_of(strata, treated_total,
                                static_cast<double>(total_control),
                                strata.end(), 0);
    if (first) {
      frontier.points.push_back({0, l1_now,
                                 static_cast<std::size_t>(total_treated),
                                 static_cast<std::size_t>(total_control),
                                 {},
                                 {}});
      first = false;
    }
    if (l1_now <= kZeroTolerance) break;

    auto step = l1_greedy_step(strata, treated_total, total_control, l1_now);
    if (!step.has_value()) break;

    const std::uint32_t removed = alive_list[step->removed_unit];
    alive[removed] = false;
    alive_list.erase(alive_list.begin() + step->removed_unit);
    ++pruned;

    if (increased(step->l1_after, previous) && frontier.points.size() > 1) {
      ++frontier.imbalance_increase_count;
      log::warn("L1 rose after re-coarsened removal (" +
                csv::format_double(previous) + " -> " +
                csv::format_double(step->l1_after) + ")");
    }
    previous = step->l1_after;
    frontier.points.push_back({pruned, step->l1_after,
                               static_cast<std::size_t>(total_treated),
                               static_cast<std::size_t>(total_control - 1),
                               {removed},
                               {}});
  }
  return frontier;
}

}  // namespace

Frontier build_frontier_l1(const MatchingSample& sample,
                           const BinningSpec& spec,
                           const FrontierOptions& options) {
  require_non_degenerate(sample);
  return options.recoarsen_bins ? build_frontier_l1_recoarsen(sample, spec)
                                : build_frontier_l1_fixed(sample, spec);
}

// ---------------------------------------------------------------------------
// AMI frontier

namespace {

struct AmiState {
  std::vector<bool> alive;
  std::size_t treated_remaining = 0;
  std::size_t control_remaining = 0;
};

double mean_over_alive(const std::vector<double>& distances,
                       const std::vector<bool>& alive, std::size_t count) {
  double sum = 0.0;
  for (std::size_t i = 0; i < distances.size(); ++i) {
    if (alive[i]) sum += distances[i];
  }
  return sum / static_cast<double>(count);
}

/// Treated pruning allowed: removing every unit tied at the maximum
/// nearest-opposite distance never removes a remaining unit's nearest match,
/// so distances are fixed for the whole greedy path.
Frontier ami_frontier_static(const MatchingSample& sample,
                             std::shared_ptr<const CovarianceModel> cov) {
  const std::vector<double> distances = nearest_opposite_distances(sample, *cov);
  const std::size_t n = sample.units.size();

  AmiState state;
  state.alive.assign(n, true);
  state.treated_remaining = sample.treated_count();
  state.control_remaining = n - state.treated_remaining;

  Frontier frontier;
  frontier.metric_kind = MetricKind::ami;
  frontier.allow_treated_pruning = true;
  frontier.original_size = n;
  frontier.covariance_snapshot = std::move(cov);

  std::size_t alive_count = n;
  double current = mean_over_alive(distances, state.alive, alive_count);
  frontier.points.push_back({0, current, state.treated_remaining,
                             state.control_remaining, {}, {}});

  std::size_t pruned = 0;
  while (current > kZeroTolerance) {
    double max_distance = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (state.alive[i] && distances[i] > max_distance) {
        max_distance = distances[i];
      }
    }
    std::vector<std::uint32_t> batch;
    std::size_t treated_in_batch = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (state.alive[i] && distances[i] == max_distance) {
        batch.push_back(static_cast<std::uint32_t>(i));
        if (sample.units[i].treated) ++treated_in_batch;
      }
    }
    const std::size_t control_in_batch = batch.size() - treated_in_batch;
    if (state.treated_remaining - treated_in_batch < 1 ||
        state.control_remaining - control_in_batch < 1 ||
        alive_count - batch.size() < 2) {
      break;
    }

    for (const auto unit : batch) state.alive[unit] = false;
    state.treated_remaining -= treated_in_batch;
    state.control_remaining -= control_in_batch;
    alive_count -= batch.size();
    pruned += batch.size();

    const double next = mean_over_alive(distances, state.alive, alive_count);
    if (increased(next, current)) {
      ++frontier.imbalance_increase_count;
      log::warn("AMI rose after removal (" + csv::format_double(current) +
                " -> " + csv::format_double(next) + ")");
    }
    current = next;
    frontier.points.push_back({pruned, current, state.treated_remaining,
                               state.control_remaining, std::move(batch), {}});
  }
  return frontier;
}

/// Treated pruning disallowed: control distances stay fixed (their nearest
/// opposite is treated), treated distances grow as controls disappear. Each
/// treated unit keeps a sorted prefix of its nearest controls and falls back
/// to a full rescan when the prefix is exhausted.
Frontier ami_frontier_controls_only(const MatchingSample& sample,
                                    std::shared_ptr<const CovarianceModel> cov) {
  const std::size_t n = sample.units.size();
  std::vector<std::uint32_t> treated_idx;
  std::vector<std::uint32_t> control_idx;
  for (std::uint32_t i = 0; i < n; ++i) {
    (sample.units[i].treated ? treated_idx : control_idx).push_back(i);
  }

  const Eigen::MatrixXd coords = whitened_coordinates(sample, *cov);
  const auto pair_distance = [&](std::uint32_t a, std::uint32_t b) {
    return std::sqrt((coords.row(static_cast<Eigen::Index>(a)) -
                      coords.row(static_cast<Eigen::Index>(b)))
                         .squaredNorm());
  };

  // Static distances for controls; sorted nearest-control prefixes for
  // treated units.
  std::vector<double> unit_distance(n, 0.0);
  for (const auto c : control_idx) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto t : treated_idx) best = std::min(best, pair_distance(c, t));
    unit_distance[c] = best;
  }

  const std::size_t prefix_size = std::min<std::size_t>(control_idx.size(), 32);
  struct Neighbor {
    double distance;
    std::uint32_t control;
  };
  std::vector<std::vector<Neighbor>> prefixes(treated_idx.size());
  std::vector<std::size_t> cursor(treated_idx.size(), 0);
  std::vector<std::uint32_t> current_match(treated_idx.size(), 0);

  std::vector<bool> alive(n, true);
  const auto rescan = [&](std::size_t t_slot) {
    const std::uint32_t t = treated_idx[t_slot];
    double best = std::numeric_limits<double>::infinity();
    std::uint32_t best_control = 0;
    for (const auto c : control_idx) {
      if (!alive[c]) continue;
      const double d = pair_distance(t, c);
      if (d < best) {
        best = d;
        best_control = c;
      }
    }
    unit_distance[t] = best;
    current_match[t_slot] = best_control;
    cursor[t_slot] = prefixes[t_slot].size();  // prefix no longer trusted
  };

  for (std::size_t s = 0; s < treated_idx.size(); ++s) {
    const std::uint32_t t = treated_idx[s];
    auto& prefix = prefixes[s];
    prefix.reserve(control_idx.size());
    for (const auto c : control_idx) prefix.push_back({pair_distance(t, c), c});
    std::partial_sort(prefix.begin(), prefix.begin() + prefix_size, prefix.end(),
                      [](const Neighbor& a, const Neighbor& b) {
                        if (a.distance != b.distance) return a.distance < b.distance;
                        return a.control < b.control;
                      });
    prefix.resize(prefix_size);
    unit_distance[t] = prefix.front().distance;
    current_match[s] = prefix.front().control;
  }

  Frontier frontier;
  frontier.metric_kind = MetricKind::ami;
  frontier.allow_treated_pruning = false;
  frontier.original_size = n;
  frontier.covariance_snapshot = std::move(cov);

  std::size_t control_remaining = control_idx.size();
  std::size_t alive_count = n;
  double current = mean_over_alive(unit_distance, alive, alive_count);
  frontier.points.push_back(
      {0, current, treated_idx.size(), control_remaining, {}, {}});

  std::size_t pruned = 0;
  while (current > kZeroTolerance) {
    double max_distance = -1.0;
    for (const auto c : control_idx) {
      if (alive[c] && unit_distance[c] > max_distance) {
        max_distance = unit_distance[c];
      }
    }
    std::vector<std::uint32_t> batch;
    for (const auto c : control_idx) {
      if (alive[c] && unit_distance[c] == max_distance) batch.push_back(c);
    }
    if (control_remaining - batch.size() < 1) break;

    for (const auto c : batch) alive[c] = false;
    control_remaining -= batch.size();
    alive_count -= batch.size();
    pruned += batch.size();

    for (std::size_t s = 0; s < treated_idx.size(); ++s) {
      if (alive[current_match[s]]) continue;
      auto& prefix = prefixes[s];
      std::size_t& at = cursor[s];
      while (at < prefix.size() && !alive[prefix[at].control]) ++at;
      if (at < prefix.size()) {
        unit_distance[treated_idx[s]] = prefix[at].distance;
        current_match[s] = prefix[at].control;
      } else {
        rescan(s);
      }
    }

    const double next = mean_over_alive(unit_distance, alive, alive_count);
    if (increased(next, current)) {
      ++frontier.imbalance_increase_count;
      log::warn("AMI rose after control-only removal (" +
                csv::format_double(current) + " -> " +
                csv::format_double(next) + ")");
    }
    current = next;
    frontier.points.push_back({pruned, current, treated_idx.size(),
                               control_remaining, std::move(batch), {}});
  }
  return frontier;
}

/// Sensitivity path: covariance re-estimated on every pruned subset, full
/// re-match each iteration.
Frontier ami_frontier_reestimated(const MatchingSample& sample,
                                  bool allow_treated_pruning,
                                  std::shared_ptr<const CovarianceModel> cov) {
  const std::size_t n = sample.units.size();
  std::vector<std::uint32_t> alive_list(n);
  for (std::uint32_t i = 0; i < n; ++i) alive_list[i] = i;

  Frontier frontier;
  frontier.metric_kind = MetricKind::ami;
  frontier.allow_treated_pruning = allow_treated_pruning;
  frontier.original_size = n;
  frontier.covariance_snapshot = std::move(cov);

  std::size_t pruned = 0;
  bool first = true;
  double previous = 0.0;
  while (true) {
    const MatchingSample current = restrict_to_units(sample, alive_list);
    const std::size_t treated_now = current.treated_count();
    const std::size_t control_now = current.units.size() - treated_now;

    CovarianceModel cov_now;
    try {
      cov_now = estimate_covariance(current);
    } catch (const Error& error) {
      log::warn(std::string("stopping re-estimated AMI frontier: ") +
                error.what());
      break;
    }
    const auto distances = nearest_opposite_distances(current, cov_now);
    double sum = 0.0;
    for (const auto d : distances) sum += d;
    const double ami_now = sum / static_cast<double>(distances.size());

    if (!first && increased(ami_now, previous)) {
      ++frontier.imbalance_increase_count;
      log::warn("AMI rose after re-estimated removal (" +
                csv::format_double(previous) + " -> " +
                csv::format_double(ami_now) + ")");
    }
    // Remaining sets are stored explicitly on this path.
    frontier.points.push_back(
        {pruned, ami_now, treated_now, control_now, {}, alive_list});
    frontier.explicit_points = true;
    first = false;
    previous = ami_now;

    if (ami_now <= kZeroTolerance) break;

    double max_distance = -1.0;
    for (std::size_t i = 0; i < current.units.size(); ++i) {
      if (!allow_treated_pruning && current.units[i].treated) continue;
      max_distance = std::max(max_distance, distances[i]);
    }
    if (max_distance < 0.0) break;
    std::vector<std::uint32_t> batch;  // positions in alive_list
    std::size_t treated_in_batch = 0;
    for (std::size_t i = 0; i < current.units.size(); ++i) {
      if (!allow_treated_pruning && current.units[i].treated) continue;
      if (distances[i] == max_distance) {
        batch.push_back(static_cast<std::uint32_t>(i));
        if (current.units[i].treated) ++treated_in_batch;
      }
    }
    const std::size_t control_in_batch = batch.size() - treated_in_batch;
    if (treated_now - treated_in_batch < 1 ||
        control_now - control_in_batch < 1 ||
        current.units.size() - batch.size() < 2) {
      break;
    }
    for (auto it = batch.rbegin(); it != batch.rend(); ++it) {
      alive_list.erase(alive_list.begin() + *it);
    }
    pruned += batch.size();
  }
  return frontier;
}

}  // namespace

Frontier build_frontier_ami(const MatchingSample& sample,
                            bool allow_treated_pruning,
                            std::shared_ptr<const CovarianceModel> cov,
                            const FrontierOptions& options) {
  require_non_degenerate(sample);
  if (cov == nullptr) {
    throw Error(Error::Kind::config, "AMI frontier needs a covariance model");
  }
  if (options.reestimate_covariance) {
    return ami_frontier_reestimated(sample, allow_treated_pruning,
                                    std::move(cov));
  }
  return allow_treated_pruning
             ? ami_frontier_static(sample, std::move(cov))
             : ami_frontier_controls_only(sample, std::move(cov));
}

// ---------------------------------------------------------------------------
// Exhaustive oracle

BruteForceMetric BruteForceMetric::l1(BinningSpec spec) {
  BruteForceMetric metric;
  metric.kind = MetricKind::l1;
  metric.spec = std::move(spec);
  return metric;
}

BruteForceMetric BruteForceMetric::ami(
    std::shared_ptr<const CovarianceModel> cov, bool allow_treated_pruning) {
  BruteForceMetric metric;
  metric.kind = MetricKind::ami;
  metric.cov = std::move(cov);
  metric.allow_treated_pruning = allow_treated_pruning;
  return metric;
}

namespace {

/// All size-k index combinations from pool (lexicographic), invoking visit
/// on each.
template <typename Visit>
void for_each_combination(const std::vector<std::uint32_t>& pool,
                          std::size_t k, Visit&& visit) {
  if (k > pool.size()) return;
  std::vector<std::size_t> pick(k);
  for (std::size_t i = 0; i < k; ++i) pick[i] = i;
  std::vector<std::uint32_t> subset(k);
  while (true) {
    for (std::size_t i = 0; i < k; ++i) subset[i] = pool[pick[i]];
    visit(subset);
    // advance
    std::size_t i = k;
    while (i > 0) {
      --i;
      if (pick[i] != i + pool.size() - k) {
        ++pick[i];
        for (std::size_t j = i + 1; j < k; ++j) pick[j] = pick[j - 1] + 1;
        break;
      }
      if (i == 0) return;
    }
    if (k == 0) return;
  }
}

}  // namespace

Frontier brute_force_frontier(const MatchingSample& sample,
                              const BruteForceMetric& metric,
                              std::size_t max_n) {
  require_non_degenerate(sample);
  const std::size_t n = sample.units.size();
  if (n > max_n) {
    throw Error(Error::Kind::size_limit,
                "brute-force frontier limited to " + std::to_string(max_n) +
                    " units, got " + std::to_string(n));
  }

  std::vector<std::uint32_t> treated_idx;
  std::vector<std::uint32_t> control_idx;
  for (std::uint32_t i = 0; i < n; ++i) {
    (sample.units[i].treated ? treated_idx : control_idx).push_back(i);
  }

  // Precomputed per-unit data.
  std::vector<std::vector<std::int32_t>> signatures;
  std::vector<std::vector<double>> pair_distance;
  if (metric.kind == MetricKind::l1) {
    signatures = bin_signatures(sample, metric.spec);
  } else {
    if (metric.cov == nullptr) {
      throw Error(Error::Kind::config, "AMI oracle needs a covariance model");
    }
    pair_distance.assign(n, std::vector<double>(n, 0.0));
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = a + 1; b < n; ++b) {
        const double d = mahalanobis(sample.units[a].covariates,
                                     sample.units[b].covariates, *metric.cov);
        pair_distance[a][b] = d;
        pair_distance[b][a] = d;
      }
    }
  }

  const auto evaluate = [&](const std::vector<std::uint32_t>& subset) {
    if (metric.kind == MetricKind::l1) {
      std::map<std::vector<std::int32_t>, std::pair<std::int64_t, std::int64_t>>
          counts;
      std::int64_t total_treated = 0;
      std::int64_t total_control = 0;
      for (const auto i : subset) {
        auto& cell = counts[signatures[i]];
        if (sample.units[i].treated) {
          ++cell.first;
          ++total_treated;
        } else {
          ++cell.second;
          ++total_control;
        }
      }
      double sum = 0.0;
      for (const auto& [signature, cell] : counts) {
        sum += std::abs(static_cast<double>(cell.first) /
                            static_cast<double>(total_treated) -
                        static_cast<double>(cell.second) /
                            static_cast<double>(total_control));
      }
      return 0.5 * sum;
    }
    double sum = 0.0;
    for (const auto i : subset) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto j : subset) {
        if (sample.units[i].treated == sample.units[j].treated) continue;
        best = std::min(best, pair_distance[i][j]);
      }
      sum += best;
    }
    return sum / static_cast<double>(subset.size());
  };

  Frontier frontier;
  frontier.metric_kind = metric.kind;
  frontier.allow_treated_pruning =
      metric.kind == MetricKind::ami && metric.allow_treated_pruning;
  frontier.original_size = n;
  frontier.explicit_points = true;
  if (metric.kind == MetricKind::l1) {
    frontier.binning_snapshot = metric.spec;
  } else {
    frontier.covariance_snapshot = metric.cov;
  }

  const bool treated_fixed = !frontier.allow_treated_pruning;
  const std::size_t min_size = treated_fixed ? treated_idx.size() + 1 : 2;

  for (std::size_t m = n; m >= min_size && m >= 2; --m) {
    double best = std::numeric_limits<double>::infinity();
    std::vector<std::uint32_t> best_subset;

    const auto consider = [&](const std::vector<std::uint32_t>& subset) {
      const double value = evaluate(subset);
      if (value < best) {
        best = value;
        best_subset = subset;
      }
    };

    if (treated_fixed) {
      const std::size_t controls_needed = m - treated_idx.size();
      for_each_combination(
          control_idx, controls_needed,
          [&](const std::vector<std::uint32_t>& controls) {
            std::vector<std::uint32_t> subset = treated_idx;
            subset.insert(subset.end(), controls.begin(), controls.end());
            std::sort(subset.begin(), subset.end());
            consider(subset);
          });
    } else {
      std::vector<std::uint32_t> all(n);
      for (std::uint32_t i = 0; i < n; ++i) all[i] = i;
      for_each_combination(all, m, [&](const std::vector<std::uint32_t>& subset) {
        std::size_t treated_in = 0;
        for (const auto i : subset) {
          if (sample.units[i].treated) ++treated_in;
        }
        if (treated_in == 0 || treated_in == subset.size()) return;
        consider(subset);
      });
    }

    if (best_subset.empty()) continue;
    std::size_t treated_in = 0;
    for (const auto i : best_subset) {
      if (sample.units[i].treated) ++treated_in;
    }
    frontier.points.push_back({n - m, best, treated_in,
                               best_subset.size() - treated_in,
                               {},
                               best_subset});
  }
  return frontier;
}

void write_frontier_csv(std::ostream& out, const Frontier& frontier) {
  out << "pruned_count,remaining_n,treated_n,control_n,imbalance\n";
  for (const auto& point : frontier.points) {
    out << point.pruned_count << ","
        << (frontier.original_size - point.pruned_count) << ","
        << point.treated_remaining << "," << point.control_remaining << ","
        << csv::format_double(point.imbalance) << "\n";
  }
}

}  // namespace fmatch
