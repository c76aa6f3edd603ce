#include "fmatch/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fmatch/errors.hpp"
#include "fmatch/rng.hpp"

namespace fmatch {

namespace {

const char* kVillageNames[] = {"adero",  "bitena", "chodu",  "damena",
                               "eleri",  "fogat",  "gilem",  "harewa",
                               "ikoro",  "jantar", "kelcha", "lumo"};

const char* kEthnicGroups[] = {"grp_a", "grp_b", "grp_c"};
const char* kReligions[] = {"rel_x", "rel_y", "rel_z"};

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

std::string village_name(int index) {
  const int pool = static_cast<int>(std::size(kVillageNames));
  std::string name = kVillageNames[index % pool];
  if (index >= pool) name += "_" + std::to_string(index / pool + 1);
  return name;
}

}  // namespace

CovariateSchema simulated_schema() {
  return CovariateSchema({
      {"farm_size", CovariateKind::continuous, "ha"},
      {"age", CovariateKind::continuous, "years"},
      {"literacy", CovariateKind::binary, ""},
      {"sex", CovariateKind::binary, ""},
      {"soil_quality", CovariateKind::continuous, "index"},
      {"distance_km", CovariateKind::continuous, "km"},
      {"shock", CovariateKind::binary, ""},
      {"oxen", CovariateKind::binary, ""},
      {"off_farm_income", CovariateKind::binary, ""},
      {"crop_variety", CovariateKind::continuous, "count"},
  });
}

PanelDataset simulate_panel(const GeneratorConfig& config) {
  if (config.villages < 1 || config.households_per_village < 1) {
    throw Error(Error::Kind::config,
                "generator needs at least one village and one household");
  }
  if (config.years.start > config.years.end) {
    throw Error(Error::Kind::config, "generator year window is inverted");
  }
  if (config.adoption_base < 0.0 || config.adoption_base > 1.0) {
    throw Error(Error::Kind::config, "adoption_base must lie in [0, 1]");
  }

  Rng rng(config.seed);
  PanelDataset panel{simulated_schema(), {}, {}};

  int household_counter = 0;
  for (int v = 0; v < config.villages; ++v) {
    const std::string village = village_name(v);
    const double distance_km = rng.uniform(3.0, 18.0);
    // Village-level culture mix: a dominant group plus minorities.
    const double ethnic_majority = rng.uniform(0.55, 0.9);
    const double religion_majority = rng.uniform(0.5, 0.85);
    const int ethnic_lead = static_cast<int>(rng.uniform_int(0, 2));
    const int religion_lead = static_cast<int>(rng.uniform_int(0, 2));

    for (int h = 0; h < config.households_per_village; ++h) {
      ++household_counter;
      char id[16];
      std::snprintf(id, sizeof(id), "hh_%05d", household_counter);

      const double z = rng.normal();
      const double farm_size = std::exp(0.6 * z);
      const int age0 = static_cast<int>(rng.uniform_int(20, 70));
      const double literacy = rng.bernoulli(0.35) ? 1.0 : 0.0;
      const double sex = rng.bernoulli(0.75) ? 1.0 : 0.0;
      const double soil = 1.0 + 2.0 * rng.uniform();
      const double oxen = rng.bernoulli(0.3) ? 1.0 : 0.0;
      const double off_farm = rng.bernoulli(0.35) ? 1.0 : 0.0;
      const double crops = 1.0 + 3.0 * rng.uniform();

      const double eth_draw = rng.uniform();
      const std::string ethnicity =
          eth_draw < ethnic_majority
              ? kEthnicGroups[ethnic_lead]
              : kEthnicGroups[(ethnic_lead + 1 + (eth_draw > (1.0 + ethnic_majority) / 2.0)) % 3];
      const double rel_draw = rng.uniform();
      const std::string religion =
          rel_draw < religion_majority
              ? kReligions[religion_lead]
              : kReligions[(religion_lead + 1 + (rel_draw > (1.0 + religion_majority) / 2.0)) % 3];

      const double age_z = (static_cast<double>(age0) - 45.0) / 14.43;
      const double treat_prob =
          sigmoid(config.treatment_base_logit + config.confounding * z +
                  config.confounding_age * age_z);

      for (int year = config.years.start; year <= config.years.end; ++year) {
        const bool treated_now = rng.bernoulli(treat_prob);
        const double adopt_prob =
            std::clamp(config.adoption_base +
                           config.adoption_slope *
                               std::max(farm_size - 1.0, 0.0) +
                           (treated_now ? config.true_effect : 0.0),
                       0.001, 0.999);
        const bool adopt_now = rng.bernoulli(adopt_prob);
        const double shock = rng.bernoulli(0.25) ? 1.0 : 0.0;

        Observation row;
        row.household_id = id;
        row.year = year;
        row.village = village;
        row.treated = treated_now;
        row.outcome = adopt_now;
        row.ethnicity = ethnicity;
        row.religion = religion;
        row.covariates = {
            farm_size,
            static_cast<double>(age0 + (year - config.years.start)),
            literacy,
            sex,
            soil,
            distance_km,
            shock,
            oxen,
            off_farm,
            crops,
        };
        panel.rows.push_back(std::move(row));
        panel.survey_years.insert(year);

        if (adopt_now) break;  // adopters leave the panel
      }
    }
  }
  return panel;
}

}  // namespace fmatch
