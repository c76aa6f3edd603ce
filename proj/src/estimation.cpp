#include "fmatch/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/distributions/students_t.hpp>

#include "fmatch/errors.hpp"
#include "fmatch/rng.hpp"

namespace fmatch {

namespace {

struct GroupStats {
  std::size_t n = 0;
  double mean = 0.0;
  double variance = 0.0;  // n-1 denominator
};

GroupStats stats_of(const std::vector<double>& values) {
  GroupStats stats;
  stats.n = values.size();
  if (stats.n == 0) return stats;
  double sum = 0.0;
  for (const double v : values) sum += v;
  stats.mean = sum / static_cast<double>(stats.n);
  if (stats.n < 2) return stats;
  double rss = 0.0;
  for (const double v : values) {
    const double dev = v - stats.mean;
    rss += dev * dev;
  }
  stats.variance = rss / static_cast<double>(stats.n - 1);
  return stats;
}

bool effectively_zero_variance(const GroupStats& stats) {
  return stats.variance <= 1e-24 * std::max(1.0, stats.mean * stats.mean);
}

}  // namespace

std::string_view to_string(Estimand estimand) {
  return estimand == Estimand::satt ? "SATT" : "FSATT";
}

AttEstimate estimate_att(const MatchingSample& subset) {
  std::size_t n_treated = 0;
  std::size_t n_control = 0;
  std::size_t adopters_treated = 0;
  std::size_t adopters_control = 0;
  for (const auto& unit : subset.units) {
    if (unit.treated) {
      ++n_treated;
      if (unit.outcome) ++adopters_treated;
    } else {
      ++n_control;
      if (unit.outcome) ++adopters_control;
    }
  }
  if (n_treated == 0 || n_control == 0) {
    throw Error(Error::Kind::degenerate_sample,
                "ATT needs both treated and control units");
  }

  const double p_treated =
      static_cast<double>(adopters_treated) / static_cast<double>(n_treated);
  const double p_control =
      static_cast<double>(adopters_control) / static_cast<double>(n_control);

  AttEstimate estimate;
  estimate.att = p_treated - p_control;
  estimate.std_error =
      std::sqrt(p_treated * (1.0 - p_treated) / static_cast<double>(n_treated) +
                p_control * (1.0 - p_control) / static_cast<double>(n_control));
  estimate.n_treated = n_treated;
  estimate.n_control = n_control;
  estimate.n_total = n_treated + n_control;
  estimate.estimand = (subset.source_treated_count > n_treated)
                          ? Estimand::fsatt
                          : Estimand::satt;
  return estimate;
}

double bootstrap_std_error(const MatchingSample& subset, int replicates,
                           std::uint64_t seed) {
  if (replicates < 2) {
    throw Error(Error::Kind::config, "bootstrap needs at least 2 replicates");
  }
  std::vector<int> treated_outcomes;
  std::vector<int> control_outcomes;
  for (const auto& unit : subset.units) {
    (unit.treated ? treated_outcomes : control_outcomes)
        .push_back(unit.outcome ? 1 : 0);
  }
  if (treated_outcomes.empty() || control_outcomes.empty()) {
    throw Error(Error::Kind::degenerate_sample,
                "bootstrap needs both treated and control units");
  }

  Rng rng(seed);
  std::vector<double> draws;
  draws.reserve(static_cast<std::size_t>(replicates));
  for (int r = 0; r < replicates; ++r) {
    std::size_t treated_hits = 0;
    for (std::size_t i = 0; i < treated_outcomes.size(); ++i) {
      treated_hits += static_cast<std::size_t>(
          treated_outcomes[static_cast<std::size_t>(rng.uniform_int(
              0, static_cast<std::int64_t>(treated_outcomes.size()) - 1))]);
    }
    std::size_t control_hits = 0;
    for (std::size_t i = 0; i < control_outcomes.size(); ++i) {
      control_hits += static_cast<std::size_t>(
          control_outcomes[static_cast<std::size_t>(rng.uniform_int(
              0, static_cast<std::int64_t>(control_outcomes.size()) - 1))]);
    }
    draws.push_back(
        static_cast<double>(treated_hits) /
            static_cast<double>(treated_outcomes.size()) -
        static_cast<double>(control_hits) /
            static_cast<double>(control_outcomes.size()));
  }
  const GroupStats stats = stats_of(draws);
  return std::sqrt(stats.variance);
}

double mean_difference_test(const std::vector<double>& values_a,
                            const std::vector<double>& values_b) {
  if (values_a.size() < 2 || values_b.size() < 2) {
    throw Error(Error::Kind::insufficient_data,
                "mean-difference test needs at least 2 values per group");
  }
  const GroupStats a = stats_of(values_a);
  const GroupStats b = stats_of(values_b);

  const bool a_constant = effectively_zero_variance(a);
  const bool b_constant = effectively_zero_variance(b);
  if (a_constant && b_constant) {
    // Exact separation has probability zero under any null; identical
    // constants carry no evidence at all.
    const double scale = std::max({1.0, std::abs(a.mean), std::abs(b.mean)});
    return std::abs(a.mean - b.mean) <= 1e-12 * scale ? 1.0 : 0.0;
  }

  const double ratio_a = a.variance / static_cast<double>(a.n);
  const double ratio_b = b.variance / static_cast<double>(b.n);
  const double t = (a.mean - b.mean) / std::sqrt(ratio_a + ratio_b);
  const double dof =
      (ratio_a + ratio_b) * (ratio_a + ratio_b) /
      (ratio_a * ratio_a / static_cast<double>(a.n - 1) +
       ratio_b * ratio_b / static_cast<double>(b.n - 1));

  const boost::math::students_t_distribution<double> dist(dof);
  const double p = 2.0 * boost::math::cdf(dist, -std::abs(t));
  return std::clamp(p, 0.0, 1.0);
}

double att_p_value(const AttEstimate& estimate) {
  if (estimate.std_error == 0.0) return estimate.att == 0.0 ? 1.0 : 0.0;
  const double z = std::abs(estimate.att / estimate.std_error);
  return std::erfc(z / std::sqrt(2.0));
}

std::string significance_stars(double p_value) {
  if (p_value < 0.01) return "***";
  if (p_value < 0.05) return "**";
  if (p_value < 0.1) return "*";
  return "";
}

BalanceReport balance_report(const MatchingSample& subset, double alpha) {
  if (subset.units.empty()) {
    throw Error(Error::Kind::degenerate_sample, "balance report on empty sample");
  }
  BalanceReport report;
  report.alpha = alpha;
  report.balanced = true;

  const std::size_t d = subset.schema.size();
  for (std::size_t j = 0; j < d; ++j) {
    std::vector<double> treated_values;
    std::vector<double> control_values;
    for (const auto& unit : subset.units) {
      (unit.treated ? treated_values : control_values)
          .push_back(unit.covariates[j]);
    }

    BalanceRow row;
    row.covariate = subset.schema.at(j).name;
    row.mean_treated = stats_of(treated_values).mean;
    row.mean_control = stats_of(control_values).mean;

    if (treated_values.size() < 2 || control_values.size() < 2) {
      row.note = "group too small to test";
      report.balanced = false;
      report.rows.push_back(std::move(row));
      continue;
    }
    const GroupStats t_stats = stats_of(treated_values);
    const GroupStats c_stats = stats_of(control_values);
    if (effectively_zero_variance(t_stats) &&
        effectively_zero_variance(c_stats)) {
      row.note = "constant in both groups";
    }
    const double p = mean_difference_test(treated_values, control_values);
    row.p_value = p;
    if (!(p > alpha)) report.balanced = false;
    report.rows.push_back(std::move(row));
  }
  return report;
}

BalancedSelection select_balanced_subset(const Frontier& frontier,
                                         const MatchingSample& sample,
                                         double alpha) {
  if (frontier.points.empty()) {
    throw Error(Error::Kind::degenerate_sample, "frontier has no points");
  }

  // Scanning in pruning order visits remaining sets in decreasing size, so
  // the first balanced point is the largest balanced one.
  std::size_t min_index = 0;
  double min_imbalance = std::numeric_limits<double>::infinity();
  for (std::size_t index = 0; index < frontier.points.size(); ++index) {
    const MatchingSample subset =
        restrict_to_units(sample, frontier.remaining_at(index));
    const BalanceReport report = balance_report(subset, alpha);
    if (report.balanced) {
      return {index, frontier.points[index], true, report};
    }
    if (frontier.points[index].imbalance < min_imbalance) {
      min_imbalance = frontier.points[index].imbalance;
      min_index = index;
    }
  }

  const MatchingSample subset =
      restrict_to_units(sample, frontier.remaining_at(min_index));
  return {min_index, frontier.points[min_index], false,
          balance_report(subset, alpha)};
}

std::vector<std::pair<std::size_t, std::optional<AttEstimate>>>
att_along_frontier(const Frontier& frontier, const MatchingSample& sample) {
  if (frontier.points.empty()) {
    throw Error(Error::Kind::degenerate_sample, "frontier has no points");
  }
  std::vector<std::pair<std::size_t, std::optional<AttEstimate>>> estimates;
  estimates.reserve(frontier.points.size());
  for (std::size_t index = 0; index < frontier.points.size(); ++index) {
    const auto& point = frontier.points[index];
    try {
      const MatchingSample subset =
          restrict_to_units(sample, frontier.remaining_at(index));
      estimates.emplace_back(point.pruned_count, estimate_att(subset));
    } catch (const Error&) {
      estimates.emplace_back(point.pruned_count, std::nullopt);
    }
  }
  return estimates;
}

}  // namespace fmatch
