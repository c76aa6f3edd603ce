#include <doctest.h>

#include <cmath>
#include <sstream>

#include "fmatch/errors.hpp"
#include "fmatch/frontier.hpp"
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

std::shared_ptr<const CovarianceModel> cov_of(const MatchingSample& sample) {
  return std::make_shared<const CovarianceModel>(estimate_covariance(sample));
}

bool points_equal(const Frontier& a, const Frontier& b) {
  if (a.points.size() != b.points.size()) return false;
  for (std::size_t i = 0; i < a.points.size(); ++i) {
    if (a.points[i].pruned_count != b.points[i].pruned_count) return false;
    if (a.points[i].imbalance != b.points[i].imbalance) return false;
    if (a.points[i].removed_in_step != b.points[i].removed_in_step) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("L1 frontier on already-balanced strata is one point") {
  // One binary covariate, identical group distributions per stratum.
  const MatchingSample sample = sample_1d(
      {{0.0, true}, {1.0, true}, {0.0, false}, {1.0, false}},
      CovariateKind::binary);
  const Frontier frontier =
      build_frontier_l1(sample, BinningSpec::default_for(sample));
  REQUIRE(frontier.points.size() == 1);
  CHECK(frontier.points[0].pruned_count == 0);
  CHECK(frontier.points[0].imbalance == 0.0);
}

TEST_CASE("L1 frontier reproduces the hand-simulated two-strata path") {
  // Stratum 0: 1 treated + 8 controls, stratum 1: 1 treated + 2 controls.
  std::vector<std::pair<double, bool>> points = {{0.0, true}, {1.0, true}};
  for (int i = 0; i < 8; ++i) points.push_back({0.0, false});
  for (int i = 0; i < 2; ++i) points.push_back({1.0, false});
  const MatchingSample sample = sample_1d(points, CovariateKind::binary);

  const Frontier frontier =
      build_frontier_l1(sample, BinningSpec::default_for(sample));

  // Hand simulation: L1 after k prunes from the surplus stratum.
  const auto l1_at = [](double c0, double c1) {
    const double total = c0 + c1;
    return 0.5 * (std::abs(0.5 - c0 / total) + std::abs(0.5 - c1 / total));
  };
  const std::vector<double> expected = {
      l1_at(8, 2), l1_at(7, 2), l1_at(6, 2), l1_at(5, 2),
      l1_at(4, 2), l1_at(3, 2), l1_at(2, 2)};
  REQUIRE(frontier.points.size() == expected.size());
  for (std::size_t k = 0; k < expected.size(); ++k) {
    CHECK(frontier.points[k].pruned_count == k);
    CHECK(std::abs(frontier.points[k].imbalance - expected[k]) <= 1e-12);
    CHECK(frontier.points[k].treated_remaining == 2);
    CHECK(frontier.points[k].control_remaining == 10 - k);
  }
  CHECK(frontier.points.front().imbalance == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(frontier.points.back().imbalance == 0.0);

  // Every removed unit is a stratum-0 control, lowest index first.
  for (std::size_t k = 1; k < frontier.points.size(); ++k) {
    REQUIRE(frontier.points[k].removed_in_step.size() == 1);
    const auto unit = frontier.points[k].removed_in_step[0];
    CHECK(sample.units[unit].covariates[0] == 0.0);
    CHECK_FALSE(sample.units[unit].treated);
  }
}

TEST_CASE("L1 frontier never reduces the treated count") {
  Rng rng(901);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = static_cast<std::size_t>(rng.uniform_int(8, 120));
    const MatchingSample sample = oracles::make_random_sample(
        rng, n, static_cast<std::size_t>(rng.uniform_int(1, 3)), 0.3, 0.8);
    const Frontier frontier =
        build_frontier_l1(sample, BinningSpec::default_for(sample, 4));
    for (const auto& point : frontier.points) {
      CHECK(point.treated_remaining == sample.treated_count());
      CHECK(point.control_remaining >= 1);
    }
    // The look-ahead acceptance makes the sequence non-increasing by
    // construction; verify anyway.
    for (std::size_t i = 1; i < frontier.points.size(); ++i) {
      CHECK(frontier.points[i].imbalance <= frontier.points[i - 1].imbalance);
    }
  }
}

TEST_CASE("AMI frontier on coincident groups is a single zero point") {
  const MatchingSample sample = sample_1d(
      {{1.0, true}, {2.0, true}, {1.0, false}, {2.0, false}});
  const Frontier frontier = build_frontier_ami(sample, true, cov_of(sample));
  REQUIRE(frontier.points.size() == 1);
  CHECK(frontier.points[0].imbalance == 0.0);
  CHECK(frontier.points[0].pruned_count == 0);
}

TEST_CASE("AMI frontier prunes the far control first on the spread fixture") {
  const MatchingSample sample = sample_1d(
      {{0.0, true}, {0.1, false}, {0.2, false}, {10.0, false}});
  const auto cov = cov_of(sample);
  const Frontier frontier = build_frontier_ami(sample, true, cov);

  REQUIRE(frontier.points.size() >= 2);
  REQUIRE(frontier.points[1].removed_in_step.size() == 1);
  CHECK(sample.units[frontier.points[1].removed_in_step[0]].covariates[0] ==
        10.0);

  // Point values agree with the brute-force distance mean at each subset.
  for (std::size_t index = 0; index < frontier.points.size(); ++index) {
    const MatchingSample subset =
        restrict_to_units(sample, frontier.remaining_at(index));
    CHECK(std::abs(frontier.points[index].imbalance -
                   oracles::brute_force_ami(subset, *cov)) <= 1e-10);
  }
}

TEST_CASE("AMI frontier with pruning allowed can remove treated units") {
  // A treated outlier far from every control is the worst-matched unit.
  std::vector<std::pair<double, bool>> points = {{50.0, true}};
  for (int i = 0; i < 5; ++i) points.push_back({i * 0.1, true});
  for (int i = 0; i < 8; ++i) points.push_back({i * 0.1, false});
  const MatchingSample sample = sample_1d(points);
  const Frontier frontier = build_frontier_ami(sample, true, cov_of(sample));

  REQUIRE(frontier.points.size() >= 2);
  CHECK(frontier.points[1].removed_in_step ==
        std::vector<std::uint32_t>{0});  // the outlier treated unit
  CHECK(frontier.points[1].treated_remaining == 5);
  CHECK(frontier.imbalance_increase_count == 0);
}

TEST_CASE("AMI frontier without treated pruning only removes controls") {
  Rng rng(4242);
  for (int trial = 0; trial < 10; ++trial) {
    const MatchingSample sample = oracles::make_random_sample(
        rng, static_cast<std::size_t>(rng.uniform_int(10, 60)), 2, 0.4, 0.6);
    const Frontier frontier = build_frontier_ami(sample, false, cov_of(sample));
    for (const auto& point : frontier.points) {
      CHECK(point.treated_remaining == sample.treated_count());
      for (const auto unit : point.removed_in_step) {
        CHECK_FALSE(sample.units[unit].treated);
      }
    }
  }
}

TEST_CASE("AMI can rise when treated pruning is disallowed; it is counted") {
  // Removing the control at 3 strands the treated unit at 10 with a farther
  // match, lifting the average.
  const MatchingSample sample = sample_1d(
      {{0.0, true}, {10.0, true}, {1.0, false}, {3.0, false}});
  const Frontier frontier = build_frontier_ami(sample, false, cov_of(sample));

  REQUIRE(frontier.points.size() == 2);
  CHECK(frontier.points[1].removed_in_step == std::vector<std::uint32_t>{3});
  CHECK(frontier.points[1].imbalance > frontier.points[0].imbalance);
  CHECK(frontier.imbalance_increase_count == 1);
}

TEST_CASE("AMI frontier values match a full per-subset recomputation") {
  Rng rng(555);
  for (const bool allow : {true, false}) {
    for (int trial = 0; trial < 8; ++trial) {
      const MatchingSample sample = oracles::make_random_sample(
          rng, static_cast<std::size_t>(rng.uniform_int(8, 50)),
          static_cast<std::size_t>(rng.uniform_int(1, 3)), 0.35, 0.4);
      const auto cov = cov_of(sample);
      const Frontier frontier = build_frontier_ami(sample, allow, cov);
      for (std::size_t index = 0; index < frontier.points.size(); ++index) {
        const MatchingSample subset =
            restrict_to_units(sample, frontier.remaining_at(index));
        CHECK(std::abs(frontier.points[index].imbalance -
                       oracles::brute_force_ami(subset, *cov)) <= 1e-10);
      }
    }
  }
}

TEST_CASE("greedy AMI frontier achieves the brute-force minimum per size") {
  Rng rng(808);
  for (int trial = 0; trial < 12; ++trial) {
    const std::size_t n = static_cast<std::size_t>(rng.uniform_int(4, 12));
    const MatchingSample sample = oracles::make_random_sample(
        rng, n, static_cast<std::size_t>(rng.uniform_int(1, 3)), 0.4, 0.5);
    const auto cov = cov_of(sample);

    const Frontier greedy = build_frontier_ami(sample, true, cov);
    const Frontier oracle =
        brute_force_frontier(sample, BruteForceMetric::ami(cov, true));

    for (const auto& point : greedy.points) {
      const std::size_t size = n - point.pruned_count;
      bool found = false;
      for (const auto& oracle_point : oracle.points) {
        if (n - oracle_point.pruned_count == size) {
          CHECK(std::abs(point.imbalance - oracle_point.imbalance) <= 1e-9);
          found = true;
          break;
        }
      }
      CHECK(found);
    }
  }
}

TEST_CASE("brute force frontier matches hand enumeration for n=3") {
  const MatchingSample sample =
      sample_1d({{0.0, true}, {1.0, false}, {3.0, false}});
  const auto cov = cov_of(sample);
  // Pooled variance of {0, 1, 3} is 7/3.
  const double scale = std::sqrt(7.0 / 3.0);
  CHECK(std::abs(cov->matrix(0, 0) - 7.0 / 3.0) <= 1e-12);

  const Frontier oracle =
      brute_force_frontier(sample, BruteForceMetric::ami(cov, true));
  REQUIRE(oracle.points.size() == 2);
  // Full set: nearest-opposite distances (1, 1, 3) scaled; mean 5/(3*scale).
  CHECK(oracle.points[0].pruned_count == 0);
  CHECK(std::abs(oracle.points[0].imbalance - 5.0 / (3.0 * scale)) <= 1e-12);
  // Size 2: best pair is treated at 0 with control at 1.
  CHECK(oracle.points[1].pruned_count == 1);
  CHECK(std::abs(oracle.points[1].imbalance - 1.0 / scale) <= 1e-12);
  CHECK(oracle.points[1].explicit_remaining ==
        std::vector<std::uint32_t>{0, 1});
}

TEST_CASE("brute force per-size minima agree with a second enumeration") {
  Rng rng(31);
  for (const bool allow : {true, false}) {
    const MatchingSample sample = oracles::make_random_sample(rng, 8, 2, 0.4, 0.5);
    const auto cov = cov_of(sample);
    const Frontier oracle =
        brute_force_frontier(sample, BruteForceMetric::ami(cov, allow));
    const auto recursive =
        oracles::recursive_frontier_minima(sample, *cov, allow);
    for (const auto& point : oracle.points) {
      const std::size_t size = sample.units.size() - point.pruned_count;
      REQUIRE(recursive.contains(size));
      CHECK(std::abs(point.imbalance - recursive.at(size)) <= 1e-12);
    }
  }
}

TEST_CASE("brute force honors the size limit") {
  Rng rng(99);
  const MatchingSample sample = oracles::make_random_sample(rng, 14, 1, 0.4, 0.0);
  const auto cov = cov_of(sample);
  try {
    brute_force_frontier(sample, BruteForceMetric::ami(cov, true));
    FAIL("expected a size-limit error");
  } catch (const Error& error) {
    CHECK(error.kind() == Error::Kind::size_limit);
  }
  CHECK_NOTHROW(
      brute_force_frontier(sample, BruteForceMetric::ami(cov, true), 14));
}

TEST_CASE("brute force for L1 keeps all treated units") {
  Rng rng(17);
  const MatchingSample sample = oracles::make_random_sample(rng, 9, 1, 0.4, 0.8);
  const Frontier oracle = brute_force_frontier(
      sample, BruteForceMetric::l1(BinningSpec::default_for(sample, 3)));
  for (const auto& point : oracle.points) {
    CHECK(point.treated_remaining == sample.treated_count());
  }
  // The greedy L1 frontier can never do better than the per-size optimum.
  const Frontier greedy =
      build_frontier_l1(sample, BinningSpec::default_for(sample, 3));
  for (const auto& point : greedy.points) {
    for (const auto& oracle_point : oracle.points) {
      if (oracle_point.pruned_count == point.pruned_count) {
        CHECK(point.imbalance >= oracle_point.imbalance - 1e-12);
      }
    }
  }
}

TEST_CASE("frontiers are deterministic") {
  Rng rng(606);
  const MatchingSample sample = oracles::make_random_sample(rng, 60, 3, 0.4, 0.5);
  const auto cov = cov_of(sample);

  const Frontier ami_a = build_frontier_ami(sample, true, cov);
  const Frontier ami_b = build_frontier_ami(sample, true, cov);
  CHECK(points_equal(ami_a, ami_b));

  const BinningSpec spec = BinningSpec::default_for(sample, 5);
  const Frontier l1_a = build_frontier_l1(sample, spec);
  const Frontier l1_b = build_frontier_l1(sample, spec);
  CHECK(points_equal(l1_a, l1_b));

  std::ostringstream csv_a;
  std::ostringstream csv_b;
  write_frontier_csv(csv_a, ami_a);
  write_frontier_csv(csv_b, ami_b);
  CHECK(csv_a.str() == csv_b.str());
}

TEST_CASE("remaining_at is consistent with the point bookkeeping") {
  Rng rng(2718);
  const MatchingSample sample = oracles::make_random_sample(rng, 40, 2, 0.3, 0.6);
  const auto cov = cov_of(sample);
  const Frontier frontier = build_frontier_ami(sample, true, cov);
  for (std::size_t index = 0; index < frontier.points.size(); ++index) {
    const auto remaining = frontier.remaining_at(index);
    CHECK(remaining.size() ==
          sample.units.size() - frontier.points[index].pruned_count);
    std::size_t treated = 0;
    for (const auto unit : remaining) {
      if (sample.units[unit].treated) ++treated;
    }
    CHECK(treated == frontier.points[index].treated_remaining);
    CHECK(remaining.size() - treated ==
          frontier.points[index].control_remaining);
  }
}

TEST_CASE("sensitivity options still produce usable frontiers") {
  Rng rng(1212);
  const MatchingSample sample = oracles::make_random_sample(rng, 24, 2, 0.4, 0.5);

  FrontierOptions recoarsen;
  recoarsen.recoarsen_bins = true;
  const Frontier l1 = build_frontier_l1(
      sample, BinningSpec::default_for(sample, 4), recoarsen);
  CHECK(l1.points.size() >= 1);
  CHECK(l1.points[0].pruned_count == 0);

  FrontierOptions reestimate;
  reestimate.reestimate_covariance = true;
  const Frontier ami = build_frontier_ami(sample, true, cov_of(sample), reestimate);
  CHECK(ami.points.size() >= 1);
  CHECK(ami.explicit_points);
  for (std::size_t i = 0; i < ami.points.size(); ++i) {
    CHECK(ami.remaining_at(i).size() ==
          sample.units.size() - ami.points[i].pruned_count);
  }
}

TEST_CASE("degenerate samples are rejected") {
  const MatchingSample no_controls = sample_1d({{0.0, true}, {1.0, true}});
  CHECK_THROWS_AS(
      build_frontier_l1(no_controls, BinningSpec::default_for(no_controls)),
      Error);
  const MatchingSample ok = sample_1d({{0.0, true}, {1.0, false}});
  CHECK_THROWS_AS(build_frontier_ami(ok, true, nullptr), Error);
}

TEST_CASE("frontier csv has the documented columns") {
  const MatchingSample sample = sample_1d(
      {{0.0, true}, {0.5, false}, {2.0, false}});
  const Frontier frontier = build_frontier_ami(sample, true, cov_of(sample));
  std::ostringstream out;
  write_frontier_csv(out, frontier);
  const std::string text = out.str();
  CHECK(text.rfind("pruned_count,remaining_n,treated_n,control_n,imbalance\n",
                   0) == 0);
  std::size_t lines = 0;
  for (const char c : text) lines += (c == '\n');
  CHECK(lines == frontier.points.size() + 1);
}
