#include "fmatch/imbalance_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "fmatch/csv.hpp"
#include "fmatch/errors.hpp"
#include "fmatch/log.hpp"

namespace fmatch {

namespace {

// Effectively-constant threshold: exact constants leave only accumulation
// noise (~eps^2 relative), far below this.
bool is_constant_variance(double variance, double mean) {
  return variance <= 1e-24 * std::max(1.0, mean * mean);
}

std::vector<double> sorted_column(const MatchingSample& sample,
                                  std::size_t column) {
  std::vector<double> values;
  values.reserve(sample.units.size());
  for (const auto& unit : sample.units) values.push_back(unit.covariates[column]);
  std::sort(values.begin(), values.end());
  return values;
}

// Nearest-rank quantile edges for k bins: edge_j = x_(ceil(n*j/k)), j=1..k-1,
// as 1-based order statistics. Duplicate edges collapse.
std::vector<double> quantile_edges(const std::vector<double>& sorted, int k) {
  const auto n = static_cast<std::int64_t>(sorted.size());
  std::vector<double> edges;
  for (int j = 1; j < k; ++j) {
    const std::int64_t rank = (n * j + k - 1) / k;  // ceil(n*j/k)
    const double edge = sorted[static_cast<std::size_t>(rank - 1)];
    if (edges.empty() || edge > edges.back()) edges.push_back(edge);
  }
  return edges;
}

// Bin index: number of edges strictly below the value, so a value equal to
// an edge lands in the bin to its left.
std::int32_t bin_of(double value, const std::vector<double>& edges) {
  std::int32_t bin = 0;
  for (double edge : edges) {
    if (value > edge) ++bin;
  }
  return bin;
}

}  // namespace

BinningSpec BinningSpec::default_for(const MatchingSample& sample, int cap) {
  if (cap < 1) throw Error(Error::Kind::config, "bin cap must be >= 1");
  BinningSpec spec;
  for (std::size_t j = 0; j < sample.schema.size(); ++j) {
    BinningRule rule;
    if (sample.schema.at(j).kind == CovariateKind::continuous) {
      std::vector<double> values = sorted_column(sample, j);
      values.erase(std::unique(values.begin(), values.end()), values.end());
      rule.kind = BinningRule::Kind::quantile_bins;
      rule.bins = std::min<int>(cap, static_cast<int>(values.size()));
      rule.bins = std::max(rule.bins, 1);
    } else {
      rule.kind = BinningRule::Kind::distinct_values;
    }
    spec.rules.push_back(std::move(rule));
  }
  return spec;
}

std::vector<std::vector<std::int32_t>> bin_signatures(
    const MatchingSample& sample, const BinningSpec& spec) {
  const std::size_t d = sample.schema.size();
  if (spec.rules.size() != d) {
    throw Error(Error::Kind::shape,
                "binning spec covers " + std::to_string(spec.rules.size()) +
                    " covariates, sample has " + std::to_string(d));
  }

  // Per-column edge sets / level tables.
  std::vector<std::vector<double>> column_edges(d);
  std::vector<std::vector<double>> column_levels(d);
  for (std::size_t j = 0; j < d; ++j) {
    const auto& rule = spec.rules[j];
    switch (rule.kind) {
      case BinningRule::Kind::distinct_values: {
        auto values = sorted_column(sample, j);
        values.erase(std::unique(values.begin(), values.end()), values.end());
        column_levels[j] = std::move(values);
        break;
      }
      case BinningRule::Kind::quantile_bins: {
        if (rule.bins < 1) {
          throw Error(Error::Kind::config, "quantile bins must be >= 1");
        }
        auto values = sorted_column(sample, j);
        const bool single_value = values.front() == values.back();
        if (single_value && rule.bins > 1) {
          log::warn("covariate '" + sample.schema.at(j).name +
                    "' has a single distinct value; quantile binning "
                    "degenerates to one bin");
        }
        column_edges[j] = single_value ? std::vector<double>{}
                                       : quantile_edges(values, rule.bins);
        break;
      }
      case BinningRule::Kind::fixed_edges: {
        for (std::size_t e = 1; e < rule.edges.size(); ++e) {
          if (!(rule.edges[e] > rule.edges[e - 1])) {
            throw Error(Error::Kind::config,
                        "fixed edges must be strictly increasing");
          }
        }
        column_edges[j] = rule.edges;
        break;
      }
    }
  }

  std::vector<std::vector<std::int32_t>> signatures;
  signatures.reserve(sample.units.size());
  for (const auto& unit : sample.units) {
    std::vector<std::int32_t> signature(d);
    for (std::size_t j = 0; j < d; ++j) {
      const double value = unit.covariates[j];
      if (spec.rules[j].kind == BinningRule::Kind::distinct_values) {
        const auto& levels = column_levels[j];
        const auto it = std::lower_bound(levels.begin(), levels.end(), value);
        signature[j] = static_cast<std::int32_t>(it - levels.begin());
      } else {
        signature[j] = bin_of(value, column_edges[j]);
      }
    }
    signatures.push_back(std::move(signature));
  }
  return signatures;
}

BinnedSample coarsen(const MatchingSample& sample, const BinningSpec& spec) {
  const auto signatures = bin_signatures(sample, spec);
  BinnedSample binned;
  for (std::size_t i = 0; i < sample.units.size(); ++i) {
    auto& cell = binned.strata[signatures[i]];
    if (sample.units[i].treated) {
      ++cell.first;
      ++binned.total_treated;
    } else {
      ++cell.second;
      ++binned.total_control;
    }
  }
  return binned;
}

double l1_imbalance(const BinnedSample& binned) {
  if (binned.total_treated <= 0 || binned.total_control <= 0) {
    throw Error(Error::Kind::degenerate_sample,
                "L1 imbalance needs both treated and control units");
  }
  const double treated_total = static_cast<double>(binned.total_treated);
  const double control_total = static_cast<double>(binned.total_control);
  double sum = 0.0;
  for (const auto& [signature, counts] : binned.strata) {
    const double t = static_cast<double>(counts.first) / treated_total;
    const double c = static_cast<double>(counts.second) / control_total;
    sum += std::abs(t - c);
  }
  return 0.5 * sum;
}

Eigen::VectorXd CovarianceModel::project(
    const std::vector<double>& covariates) const {
  if (covariates.size() != full_dimension) {
    throw Error(Error::Kind::shape,
                "vector has " + std::to_string(covariates.size()) +
                    " entries, covariance model expects " +
                    std::to_string(full_dimension));
  }
  Eigen::VectorXd out(static_cast<Eigen::Index>(retained_columns.size()));
  for (std::size_t k = 0; k < retained_columns.size(); ++k) {
    out[static_cast<Eigen::Index>(k)] = covariates[retained_columns[k]];
  }
  return out;
}

CovarianceModel estimate_covariance(const MatchingSample& sample) {
  const std::size_t n = sample.units.size();
  const std::size_t d = sample.schema.size();
  if (n < 2) {
    throw Error(Error::Kind::insufficient_data,
                "covariance needs at least 2 units, got " + std::to_string(n));
  }

  Eigen::MatrixXd data(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      data(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          sample.units[i].covariates[j];
    }
  }
  const Eigen::RowVectorXd means = data.colwise().mean();
  const Eigen::MatrixXd centered = data.rowwise() - means;
  const Eigen::MatrixXd full_cov =
      (centered.transpose() * centered) / static_cast<double>(n - 1);

  CovarianceModel model;
  model.full_dimension = d;

  // Constant columns first.
  std::vector<std::size_t> candidates;
  for (std::size_t j = 0; j < d; ++j) {
    const auto jj = static_cast<Eigen::Index>(j);
    if (is_constant_variance(full_cov(jj, jj), means[jj])) {
      model.dropped_columns.push_back(j);
    } else {
      candidates.push_back(j);
    }
  }

  // Incremental Cholesky over the remaining columns, in schema order; a
  // column whose conditional variance collapses is collinear with earlier
  // ones and is dropped.
  std::vector<std::size_t> retained;
  Eigen::MatrixXd chol(static_cast<Eigen::Index>(candidates.size()),
                       static_cast<Eigen::Index>(candidates.size()));
  Eigen::Index rank = 0;
  for (const std::size_t j : candidates) {
    const auto jj = static_cast<Eigen::Index>(j);
    Eigen::VectorXd cross(rank);
    for (Eigen::Index r = 0; r < rank; ++r) {
      cross[r] = full_cov(static_cast<Eigen::Index>(retained[r]), jj);
    }
    Eigen::VectorXd w(rank);
    if (rank > 0) {
      w = chol.topLeftCorner(rank, rank)
              .triangularView<Eigen::Lower>()
              .solve(cross);
    }
    const double conditional = full_cov(jj, jj) - w.squaredNorm();
    if (conditional <= 1e-10 * full_cov(jj, jj)) {
      model.dropped_columns.push_back(j);
      continue;
    }
    chol.block(rank, 0, 1, rank) = w.transpose();
    chol(rank, rank) = std::sqrt(conditional);
    retained.push_back(j);
    ++rank;
  }
  std::sort(model.dropped_columns.begin(), model.dropped_columns.end());
  model.retained_columns = retained;

  if (retained.empty()) {
    throw Error(Error::Kind::degenerate_sample,
                "every covariate column was dropped as constant or collinear");
  }

  const auto r = static_cast<Eigen::Index>(retained.size());
  Eigen::MatrixXd reduced(r, r);
  for (Eigen::Index a = 0; a < r; ++a) {
    for (Eigen::Index b = 0; b < r; ++b) {
      reduced(a, b) = full_cov(static_cast<Eigen::Index>(retained[a]),
                               static_cast<Eigen::Index>(retained[b]));
    }
  }

  const Eigen::MatrixXd identity = Eigen::MatrixXd::Identity(r, r);
  double ridge = 0.0;
  Eigen::MatrixXd regularized = reduced;
  for (int attempt = 0; attempt < 24; ++attempt) {
    const Eigen::LLT<Eigen::MatrixXd> llt(regularized);
    if (llt.info() == Eigen::Success) {
      const Eigen::MatrixXd inverse = llt.solve(identity);
      const double residual =
          (regularized * inverse - identity).cwiseAbs().maxCoeff();
      if (residual <= 1e-8) {
        model.matrix = regularized;
        model.inverse = inverse;
        model.ridge = ridge;
        if (ridge > 0.0) {
          log::warn("covariance ridge " + csv::format_double(ridge) +
                    " applied to reach an invertible matrix");
        }
        return model;
      }
    }
    ridge = (ridge == 0.0) ? 1e-8 * reduced.trace() / static_cast<double>(r)
                           : ridge * 10.0;
    regularized = reduced + ridge * identity;
  }
  throw Error(Error::Kind::degenerate_sample,
              "covariance matrix could not be inverted even with ridge");
}

double mahalanobis(const std::vector<double>& x_i,
                   const std::vector<double>& x_j,
                   const CovarianceModel& cov) {
  const Eigen::VectorXd diff = cov.project(x_i) - cov.project(x_j);
  const double squared = diff.dot(cov.inverse * diff);
  return std::sqrt(std::max(squared, 0.0));
}

namespace {

/// Whitening transform M with M'M = S^-1, so Mahalanobis distance becomes
/// Euclidean distance between transformed points.
Eigen::MatrixXd whitening_transform(const CovarianceModel& cov) {
  const Eigen::MatrixXd symmetric =
      0.5 * (cov.inverse + cov.inverse.transpose());
  const Eigen::LLT<Eigen::MatrixXd> llt(symmetric);
  if (llt.info() != Eigen::Success) {
    throw Error(Error::Kind::degenerate_sample,
                "covariance inverse is not positive definite");
  }
  return Eigen::MatrixXd(llt.matrixL()).transpose();
}

}  // namespace

Eigen::MatrixXd whitened_coordinates(const MatchingSample& sample,
                                     const CovarianceModel& cov) {
  const auto n = static_cast<Eigen::Index>(sample.units.size());
  const Eigen::MatrixXd transform = whitening_transform(cov);
  Eigen::MatrixXd coords(n, transform.rows());
  for (Eigen::Index i = 0; i < n; ++i) {
    coords.row(i) =
        (transform *
         cov.project(sample.units[static_cast<std::size_t>(i)].covariates))
            .transpose();
  }
  // Centering keeps the squared-norm expansion well conditioned.
  coords.rowwise() -= Eigen::RowVectorXd(coords.colwise().mean());
  return coords;
}

std::vector<double> nearest_opposite_distances(const MatchingSample& sample,
                                               const CovarianceModel& cov) {
  const std::size_t n = sample.units.size();
  std::vector<std::size_t> treated_idx;
  std::vector<std::size_t> control_idx;
  for (std::size_t i = 0; i < n; ++i) {
    (sample.units[i].treated ? treated_idx : control_idx).push_back(i);
  }
  if (treated_idx.empty() || control_idx.empty()) {
    throw Error(Error::Kind::degenerate_sample,
                "nearest-opposite distances need both groups non-empty");
  }

  const Eigen::MatrixXd coords = whitened_coordinates(sample, cov);
  Eigen::MatrixXd treated(static_cast<Eigen::Index>(treated_idx.size()),
                          coords.cols());
  Eigen::MatrixXd control(static_cast<Eigen::Index>(control_idx.size()),
                          coords.cols());
  for (std::size_t a = 0; a < treated_idx.size(); ++a) {
    treated.row(static_cast<Eigen::Index>(a)) =
        coords.row(static_cast<Eigen::Index>(treated_idx[a]));
  }
  for (std::size_t b = 0; b < control_idx.size(); ++b) {
    control.row(static_cast<Eigen::Index>(b)) =
        coords.row(static_cast<Eigen::Index>(control_idx[b]));
  }

  const Eigen::VectorXd treated_norms = treated.rowwise().squaredNorm();
  const Eigen::VectorXd control_norms = control.rowwise().squaredNorm();

  std::vector<double> treated_min(
      treated_idx.size(), std::numeric_limits<double>::infinity());
  std::vector<double> control_min(
      control_idx.size(), std::numeric_limits<double>::infinity());

  constexpr Eigen::Index kBlock = 512;
  for (Eigen::Index t0 = 0; t0 < treated.rows(); t0 += kBlock) {
    const Eigen::Index rows = std::min<Eigen::Index>(kBlock, treated.rows() - t0);
    const Eigen::MatrixXd cross =
        treated.middleRows(t0, rows) * control.transpose();
    for (Eigen::Index a = 0; a < rows; ++a) {
      const double tn = treated_norms[t0 + a];
      double best = treated_min[static_cast<std::size_t>(t0 + a)];
      for (Eigen::Index b = 0; b < control.rows(); ++b) {
        const double squared = tn + control_norms[b] - 2.0 * cross(a, b);
        if (squared < best) best = squared;
        auto& cmin = control_min[static_cast<std::size_t>(b)];
        if (squared < cmin) cmin = squared;
      }
      treated_min[static_cast<std::size_t>(t0 + a)] = best;
    }
  }

  std::vector<double> distances(n, 0.0);
  for (std::size_t a = 0; a < treated_idx.size(); ++a) {
    distances[treated_idx[a]] = std::sqrt(std::max(treated_min[a], 0.0));
  }
  for (std::size_t b = 0; b < control_idx.size(); ++b) {
    distances[control_idx[b]] = std::sqrt(std::max(control_min[b], 0.0));
  }
  return distances;
}

double ami(const MatchingSample& sample, const CovarianceModel& cov) {
  const auto distances = nearest_opposite_distances(sample, cov);
  double sum = 0.0;
  for (double value : distances) sum += value;
  return sum / static_cast<double>(distances.size());
}

void write_covariance_csv(std::ostream& out, const CovarianceModel& cov,
                          const CovariateSchema& schema) {
  out << "# ridge: " << csv::format_double(cov.ridge) << "\n";
  out << "# dropped:";
  for (const auto j : cov.dropped_columns) out << " " << schema.at(j).name;
  out << "\n";
  std::vector<std::string> header = {"covariate"};
  for (const auto j : cov.retained_columns) header.push_back(schema.at(j).name);
  out << csv::join(header) << "\n";
  for (Eigen::Index a = 0; a < cov.matrix.rows(); ++a) {
    std::vector<std::string> fields = {
        schema.at(cov.retained_columns[static_cast<std::size_t>(a)]).name};
    for (Eigen::Index b = 0; b < cov.matrix.cols(); ++b) {
      fields.push_back(csv::format_double(cov.matrix(a, b)));
    }
    out << csv::join(fields) << "\n";
  }
}

}  // namespace fmatch
