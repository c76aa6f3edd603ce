#include <doctest.h>

#include <cmath>
#include <sstream>
#include <tuple>

#include "fmatch/errors.hpp"
#include "fmatch/imbalance_metrics.hpp"
#include "fmatch/rng.hpp"
#include "oracles.hpp"

using namespace fmatch;

namespace {

MatchingSample sample_1d(const std::vector<std::pair<double, bool>>& points,
                         CovariateKind kind = CovariateKind::continuous) {
  MatchingSample sample{CovariateSchema({{"x", kind, ""}}),
                        {},
                        Provenance::subset,
                        "fixture",
                        0};
  for (std::size_t i = 0; i < points.size(); ++i) {
    SampleUnit unit;
    unit.unit_id = "u" + std::to_string(i);
    unit.year = 2000;
    unit.village = "v";
    unit.treated = points[i].second;
    unit.covariates = {points[i].first};
    sample.units.push_back(std::move(unit));
  }
  sample.source_treated_count = sample.treated_count();
  return sample;
}

CovarianceModel identity_model(std::size_t d) {
  CovarianceModel model;
  model.full_dimension = d;
  model.matrix = Eigen::MatrixXd::Identity(static_cast<long>(d),
                                           static_cast<long>(d));
  model.inverse = model.matrix;
  for (std::size_t j = 0; j < d; ++j) model.retained_columns.push_back(j);
  return model;
}

}  // namespace

TEST_CASE("coarsen tabulates one binary covariate") {
  const MatchingSample sample = sample_1d(
      {{0.0, true}, {1.0, true}, {0.0, false}, {1.0, false}},
      CovariateKind::binary);
  BinningSpec spec = BinningSpec::default_for(sample);
  const BinnedSample binned = coarsen(sample, spec);
  REQUIRE(binned.strata.size() == 2);
  CHECK(binned.total_treated == 2);
  CHECK(binned.total_control == 2);
  for (const auto& [signature, counts] : binned.strata) {
    CHECK(counts.first == 1);
    CHECK(counts.second == 1);
  }
}

TEST_CASE("coarsen matches hand tabulation on two binary covariates") {
  MatchingSample sample{CovariateSchema({{"a", CovariateKind::binary, ""},
                                         {"b", CovariateKind::binary, ""}}),
                        {},
                        Provenance::subset,
                        "fixture",
                        0};
  const std::vector<std::tuple<double, double, bool>> rows = {
      {0, 0, true}, {0, 1, true}, {1, 0, true}, {1, 1, true},
      {0, 0, false}, {0, 0, false}, {1, 1, false}, {1, 0, false}};
  for (std::size_t i = 0; i < rows.size(); ++i) {
    SampleUnit unit;
    unit.unit_id = "u" + std::to_string(i);
    unit.treated = std::get<2>(rows[i]);
    unit.covariates = {std::get<0>(rows[i]), std::get<1>(rows[i])};
    sample.units.push_back(std::move(unit));
  }

  const BinnedSample binned = coarsen(sample, BinningSpec::default_for(sample));
  REQUIRE(binned.strata.size() == 4);
  // Hand tabulation: (0,0): t1 c2; (0,1): t1 c0; (1,0): t1 c1; (1,1): t1 c1.
  const auto at = [&](std::int32_t a, std::int32_t b) {
    return binned.strata.at({a, b});
  };
  CHECK(at(0, 0) == std::make_pair<std::int64_t, std::int64_t>(1, 2));
  CHECK(at(0, 1) == std::make_pair<std::int64_t, std::int64_t>(1, 0));
  CHECK(at(1, 0) == std::make_pair<std::int64_t, std::int64_t>(1, 1));
  CHECK(at(1, 1) == std::make_pair<std::int64_t, std::int64_t>(1, 1));
}

TEST_CASE("two quantile bins split 1,2,3,4 at the nearest-rank median") {
  const MatchingSample sample = sample_1d(
      {{1.0, true}, {2.0, true}, {3.0, false}, {4.0, false}});
  BinningSpec spec;
  BinningRule rule;
  rule.kind = BinningRule::Kind::quantile_bins;
  rule.bins = 2;
  spec.rules = {rule};

  const auto signatures = bin_signatures(sample, spec);
  CHECK(signatures[0] == std::vector<std::int32_t>{0});  // 1 <= 2
  CHECK(signatures[1] == std::vector<std::int32_t>{0});  // 2 <= 2
  CHECK(signatures[2] == std::vector<std::int32_t>{1});  // 3 > 2
  CHECK(signatures[3] == std::vector<std::int32_t>{1});  // 4 > 2
}

TEST_CASE("quantile binning on a constant column degenerates to one bin") {
  const MatchingSample sample = sample_1d(
      {{5.0, true}, {5.0, true}, {5.0, false}, {5.0, false}});
  BinningSpec spec;
  BinningRule rule;
  rule.kind = BinningRule::Kind::quantile_bins;
  rule.bins = 4;
  spec.rules = {rule};
  const BinnedSample binned = coarsen(sample, spec);
  CHECK(binned.strata.size() == 1);
}

TEST_CASE("fixed edges must increase strictly") {
  const MatchingSample sample = sample_1d({{1.0, true}, {2.0, false}});
  BinningSpec spec;
  BinningRule rule;
  rule.kind = BinningRule::Kind::fixed_edges;
  rule.edges = {2.0, 1.0};
  spec.rules = {rule};
  CHECK_THROWS_AS(coarsen(sample, spec), Error);
}

TEST_CASE("l1 imbalance on hand-computed fixtures") {
  BinnedSample identical;
  identical.strata[{0}] = {2, 4};
  identical.strata[{1}] = {2, 4};
  identical.total_treated = 4;
  identical.total_control = 8;
  CHECK(l1_imbalance(identical) == 0.0);

  BinnedSample disjoint;
  disjoint.strata[{0}] = {3, 0};
  disjoint.strata[{1}] = {0, 5};
  disjoint.total_treated = 3;
  disjoint.total_control = 5;
  CHECK(l1_imbalance(disjoint) == 1.0);

  // Treated split (0.5, 0.5), control concentrated (1.0, 0.0).
  BinnedSample half;
  half.strata[{0}] = {1, 6};
  half.strata[{1}] = {1, 0};
  half.total_treated = 2;
  half.total_control = 6;
  CHECK(std::abs(l1_imbalance(half) - 0.5) <= 1e-12);

  BinnedSample empty;
  CHECK_THROWS_AS(l1_imbalance(empty), Error);
}

TEST_CASE("l1 is invariant under stratum relabeling and count scaling") {
  Rng rng(77);
  for (int trial = 0; trial < 20; ++trial) {
    BinnedSample base;
    const int strata = static_cast<int>(rng.uniform_int(2, 6));
    for (int s = 0; s < strata; ++s) {
      const auto treated = rng.uniform_int(0, 5);
      const auto control = rng.uniform_int(0, 5);
      base.strata[{s}] = {treated, control};
      base.total_treated += treated;
      base.total_control += control;
    }
    if (base.total_treated == 0 || base.total_control == 0) continue;
    const double value = l1_imbalance(base);
    CHECK(value >= 0.0);
    CHECK(value <= 1.0);

    // Relabeling: reverse the signature order.
    BinnedSample relabeled;
    relabeled.total_treated = base.total_treated;
    relabeled.total_control = base.total_control;
    for (const auto& [signature, counts] : base.strata) {
      relabeled.strata[{-signature[0]}] = counts;
    }
    CHECK(std::abs(l1_imbalance(relabeled) - value) <= 1e-12);

    // Multiplying every control count by a positive integer.
    BinnedSample scaled;
    scaled.total_treated = base.total_treated;
    for (const auto& [signature, counts] : base.strata) {
      scaled.strata[signature] = {counts.first, counts.second * 3};
      scaled.total_control += counts.second * 3;
    }
    CHECK(std::abs(l1_imbalance(scaled) - value) <= 1e-12);
  }
}

TEST_CASE("covariance of 1-D values {0, 2} is exactly 2") {
  const MatchingSample sample = sample_1d({{0.0, true}, {2.0, false}});
  const CovarianceModel model = estimate_covariance(sample);
  REQUIRE(model.retained_columns.size() == 1);
  CHECK(model.matrix(0, 0) == 2.0);
  CHECK(std::abs(model.inverse(0, 0) - 0.5) <= 1e-12);
  CHECK(model.ridge == 0.0);
}

TEST_CASE("constant columns are dropped; all dropped is an error") {
  MatchingSample sample{CovariateSchema({{"a", CovariateKind::continuous, ""},
                                         {"b", CovariateKind::continuous, ""}}),
                        {},
                        Provenance::subset,
                        "fixture",
                        0};
  for (int i = 0; i < 6; ++i) {
    SampleUnit unit;
    unit.unit_id = "u" + std::to_string(i);
    unit.treated = i < 3;
    unit.covariates = {7.5, static_cast<double>(i)};
    sample.units.push_back(std::move(unit));
  }
  const CovarianceModel model = estimate_covariance(sample);
  CHECK(model.dropped_columns == std::vector<std::size_t>{0});
  CHECK(model.retained_columns == std::vector<std::size_t>{1});

  for (auto& unit : sample.units) unit.covariates[1] = 3.25;
  CHECK_THROWS_AS(estimate_covariance(sample), Error);
}

TEST_CASE("exactly collinear columns drop the later one") {
  MatchingSample sample{CovariateSchema({{"a", CovariateKind::continuous, ""},
                                         {"b", CovariateKind::continuous, ""},
                                         {"c", CovariateKind::continuous, ""}}),
                        {},
                        Provenance::subset,
                        "fixture",
                        0};
  Rng rng(3);
  for (int i = 0; i < 12; ++i) {
    SampleUnit unit;
    unit.unit_id = "u" + std::to_string(i);
    unit.treated = i % 2 == 0;
    const double x = rng.normal();
    const double y = rng.normal();
    unit.covariates = {x, 2.0 * x - 1.0, y};  // b is affine in a
    sample.units.push_back(std::move(unit));
  }
  const CovarianceModel model = estimate_covariance(sample);
  CHECK(model.dropped_columns == std::vector<std::size_t>{1});
  CHECK(model.retained_columns == std::vector<std::size_t>{0, 2});

  // The inverse actually inverts the retained matrix.
  const Eigen::MatrixXd residual =
      model.matrix * model.inverse -
      Eigen::MatrixXd::Identity(model.matrix.rows(), model.matrix.cols());
  CHECK(residual.cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("covariance needs at least two units") {
  const MatchingSample sample = sample_1d({{1.0, true}});
  CHECK_THROWS_AS(estimate_covariance(sample), Error);
}

TEST_CASE("mahalanobis hand fixtures") {
  const CovarianceModel identity = identity_model(2);
  CHECK(mahalanobis({1.0, 2.0}, {1.0, 2.0}, identity) == 0.0);
  CHECK(std::abs(mahalanobis({0.0, 0.0}, {3.0, 4.0}, identity) - 5.0) <= 1e-12);

  CovarianceModel diagonal = identity_model(2);
  diagonal.matrix = Eigen::Vector2d(4.0, 1.0).asDiagonal();
  diagonal.inverse = Eigen::Vector2d(0.25, 1.0).asDiagonal();
  CHECK(std::abs(mahalanobis({2.0, 0.0}, {0.0, 0.0}, diagonal) - 1.0) <= 1e-12);

  CHECK_THROWS_AS(mahalanobis({1.0}, {1.0, 2.0}, identity), Error);
}

TEST_CASE("mahalanobis is a pseudometric on random triples") {
  Rng rng(123);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t d = static_cast<std::size_t>(rng.uniform_int(1, 4));
    MatchingSample sample = oracles::make_random_sample(rng, 24, d, 0.4, 0.3);
    const CovarianceModel cov = estimate_covariance(sample);

    std::vector<double> x(d), y(d), z(d);
    for (std::size_t j = 0; j < d; ++j) {
      x[j] = rng.normal();
      y[j] = rng.normal();
      z[j] = rng.normal();
    }
    const double xy = mahalanobis(x, y, cov);
    const double yx = mahalanobis(y, x, cov);
    const double xz = mahalanobis(x, z, cov);
    const double zy = mahalanobis(z, y, cov);
    CHECK(xy == yx);
    CHECK(xy >= 0.0);
    CHECK(mahalanobis(x, x, cov) == 0.0);
    CHECK(xy <= xz + zy + 1e-9);
  }
}

TEST_CASE("mahalanobis distances are invariant to affine covariate rescaling") {
  Rng rng(321);
  MatchingSample sample = oracles::make_random_sample(rng, 40, 3, 0.5, 0.4);
  const CovarianceModel before = estimate_covariance(sample);
  const double reference = mahalanobis(sample.units[0].covariates,
                                       sample.units[1].covariates, before);

  MatchingSample rescaled = sample;
  for (auto& unit : rescaled.units) {
    unit.covariates[1] = -2.5 * unit.covariates[1] + 7.0;
  }
  const CovarianceModel after = estimate_covariance(rescaled);
  const double transformed = mahalanobis(rescaled.units[0].covariates,
                                         rescaled.units[1].covariates, after);
  CHECK(std::abs(reference - transformed) <= 1e-8);
}

TEST_CASE("ami trivial fixtures") {
  // Every treated coincides with a control.
  const MatchingSample coincident = sample_1d(
      {{1.0, true}, {2.0, true}, {1.0, false}, {2.0, false}});
  const CovarianceModel cov = estimate_covariance(coincident);
  CHECK(ami(coincident, cov) == 0.0);

  // One treated at 0, one control at x: mean of two equal distances.
  const MatchingSample pair = sample_1d({{0.0, true}, {3.0, false}});
  const CovarianceModel pair_cov = estimate_covariance(pair);
  const double expected =
      mahalanobis(pair.units[0].covariates, pair.units[1].covariates, pair_cov);
  CHECK(std::abs(ami(pair, pair_cov) - expected) <= 1e-12);

  const MatchingSample one_sided = sample_1d({{0.0, true}, {1.0, true}});
  CHECK_THROWS_AS(ami(one_sided, cov), Error);
}

TEST_CASE("ami equals brute force on the 1-D spread fixture") {
  const MatchingSample sample = sample_1d(
      {{0.0, true}, {0.1, false}, {0.2, false}, {10.0, false}});
  const CovarianceModel cov = estimate_covariance(sample);
  const double fast = ami(sample, cov);
  const double brute = oracles::brute_force_ami(sample, cov);
  CHECK(std::abs(fast - brute) <= 1e-12);
  // Hand value: distances (0.1 + 0.1 + 0.2 + 10) / (4 * s).
  const double s = std::sqrt(cov.matrix(0, 0));
  CHECK(std::abs(fast - 10.4 / (4.0 * s)) <= 1e-12);
}

TEST_CASE("ami matches the brute-force oracle on random samples") {
  Rng rng(2024);
  for (int trial = 0; trial < 25; ++trial) {
    const std::size_t n = static_cast<std::size_t>(rng.uniform_int(6, 80));
    const std::size_t d = static_cast<std::size_t>(rng.uniform_int(1, 5));
    const MatchingSample sample =
        oracles::make_random_sample(rng, n, d, 0.35, 0.5);
    const CovarianceModel cov = estimate_covariance(sample);
    CHECK(std::abs(ami(sample, cov) - oracles::brute_force_ami(sample, cov)) <=
          1e-10);
  }
}

TEST_CASE("covariance csv audit export") {
  const MatchingSample sample = sample_1d({{0.0, true}, {2.0, false}});
  const CovarianceModel cov = estimate_covariance(sample);
  std::ostringstream out;
  write_covariance_csv(out, cov, sample.schema);
  const std::string text = out.str();
  CHECK(text.find("# ridge: 0") != std::string::npos);
  CHECK(text.find("x") != std::string::npos);
  CHECK(text.find("2") != std::string::npos);
}
