// Temporary calibration harness for the ATT-recovery acceptance criterion.
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <iostream>

#include "fmatch/estimation.hpp"
#include "fmatch/frontier.hpp"
#include "fmatch/pipeline.hpp"
#include "fmatch/sample_builder.hpp"
#include "fmatch/simulate.hpp"

using namespace fmatch;

int main(int argc, char** argv) {
  double confounding = argc > 1 ? std::atof(argv[1]) : 1.2;
  double slope = argc > 2 ? std::atof(argv[2]) : 0.08;
  int households = argc > 3 ? std::atoi(argv[3]) : 60;
  double floor_bias = argc > 4 ? std::atof(argv[4]) : 0.04;
  int mode = argc > 5 ? std::atoi(argv[5]) : 0;  // 0=ami true,1=ami false,2=l1
  int reps = argc > 6 ? std::atoi(argv[6]) : 200;
  double conf_age = argc > 7 ? std::atof(argv[7]) : 0.0;
  std::uint64_t master = argc > 8 ? std::strtoull(argv[8], nullptr, 10) : 1000;

  const auto start = std::chrono::steady_clock::now();
  int coverage = 0, naive_miss = 0, balanced_count = 0, errors = 0;
  double naive_bias_sum = 0.0, att_sum = 0.0, se_sum = 0.0;
  double mean_nt = 0, mean_n = 0, mean_sel_nt = 0, mean_sel_n = 0;

  for (int rep = 0; rep < reps; ++rep) {
    GeneratorConfig gen;
    gen.villages = 4;
    gen.households_per_village = households;
    gen.years = {1994, 2003};
    gen.true_effect = 0.5;
    gen.confounding = confounding;
    gen.confounding_age = conf_age;
    gen.adoption_slope = slope;
    gen.seed = master + static_cast<std::uint64_t>(rep);

    try {
      const PanelDataset panel = simulate_panel(gen);
      PoolingConfig pooling;
      pooling.study_window = gen.years;
      pooling.covariate_subset = {"farm_size", "age"};
      const MatchingSample sample = build_full_pooling(panel, pooling);
      const AttEstimate naive = estimate_att(sample);
      naive_bias_sum += naive.att - 0.5;
      mean_nt += sample.treated_count();
      mean_n += sample.units.size();
      if (std::abs(naive.att - 0.5) >= floor_bias) ++naive_miss;

      Frontier frontier;
      if (mode == 2) {
        frontier = build_frontier_l1(sample, BinningSpec::default_for(sample, 10));
      } else {
        auto cov = std::make_shared<const CovarianceModel>(estimate_covariance(sample));
        frontier = build_frontier_ami(sample, mode == 0, cov);
      }
      const BalancedSelection sel = select_balanced_subset(frontier, sample, 0.10);
      if (sel.balanced) ++balanced_count;
      const MatchingSample matched =
          restrict_to_units(sample, frontier.remaining_at(sel.point_index));
      const AttEstimate att = estimate_att(matched);
      att_sum += att.att;
      se_sum += att.std_error;
      mean_sel_nt += att.n_treated;
      mean_sel_n += att.n_total;
      if (std::abs(att.att - 0.5) <= 2.0 * att.std_error) ++coverage;
    } catch (const std::exception& e) {
      ++errors;
      std::cerr << "rep " << rep << " error: " << e.what() << "\n";
    }
  }
  const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                      std::chrono::steady_clock::now() - start).count();
  std::cout << "conf=" << confounding << " slope=" << slope
            << " hh=" << households << " floor=" << floor_bias
            << " mode=" << mode << "\n";
  std::cout << "coverage " << coverage << "/" << reps
            << "  naive_miss " << naive_miss
            << "  balanced " << balanced_count
            << "  errors " << errors << "\n";
  std::cout << "mean naive bias " << naive_bias_sum / reps
            << "  mean att " << att_sum / reps
            << "  mean se " << se_sum / reps << "\n";
  std::cout << "mean sample n " << mean_n / reps << " nt " << mean_nt / reps
            << "  selected n " << mean_sel_n / reps << " nt "
            << mean_sel_nt / reps << "\n";
  std::cout << "time " << ms << " ms\n";
  return 0;
}
