#include "fmatch/sample_builder.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <ostream>
#include <utility>

#include "fmatch/csv.hpp"
#include "fmatch/errors.hpp"
#include "fmatch/log.hpp"

namespace fmatch {

namespace {

constexpr int kNoYear = std::numeric_limits<int>::max();

struct HouseholdTimeline {
  std::vector<const Observation*> rows;  // sorted by year
  int first_treatment = kNoYear;         // over the whole panel
  int first_adoption = kNoYear;
};

std::map<std::string, HouseholdTimeline> collect_timelines(
    const PanelDataset& panel) {
  std::map<std::string, HouseholdTimeline> timelines;
  for (const auto& row : panel.rows) {
    auto& timeline = timelines[row.household_id];
    timeline.rows.push_back(&row);
    if (row.treated) timeline.first_treatment = std::min(timeline.first_treatment, row.year);
    if (row.outcome) timeline.first_adoption = std::min(timeline.first_adoption, row.year);
  }
  for (auto& [id, timeline] : timelines) {
    std::sort(timeline.rows.begin(), timeline.rows.end(),
              [](const Observation* a, const Observation* b) {
                return a->year < b->year;
              });
  }
  return timelines;
}

struct EncodingPlan {
  std::vector<CovariateEntry> sample_entries;
  // For each sample column: source panel column and, for one-hot columns,
  // the level the indicator fires on.
  struct Column {
    std::size_t panel_index;
    bool one_hot;
    std::string level;
  };
  std::vector<Column> columns;
};

EncodingPlan plan_encoding(const PanelDataset& panel,
                           const std::vector<std::string>& covariate_subset,
                           const std::vector<const Observation*>& kept_rows) {
  EncodingPlan plan;
  for (const auto& name : covariate_subset) {
    const auto index = panel.schema.index_of(name);
    if (!index.has_value()) {
      throw Error(Error::Kind::config,
                  "covariate '" + name + "' is not in the panel schema");
    }
    const auto& entry = panel.schema.at(*index);
    if (entry.kind != CovariateKind::categorical) {
      plan.sample_entries.push_back(entry);
      plan.columns.push_back({*index, false, ""});
      continue;
    }
    // One indicator column per observed level, lexicographic for determinism.
    std::set<std::string> levels;
    for (const auto* row : kept_rows) {
      levels.insert(std::get<std::string>(row->covariates[*index]));
    }
    for (const auto& level : levels) {
      plan.sample_entries.push_back(
          {entry.name + "=" + level, CovariateKind::binary, ""});
      plan.columns.push_back({*index, true, level});
    }
  }
  return plan;
}

MatchingSample build_pooled(const PanelDataset& panel,
                            const PoolingConfig& config, bool partial) {
  const YearWindow window = config.study_window;
  if (window.start > window.end) {
    throw Error(Error::Kind::config, "study window start exceeds end");
  }
  if (partial) {
    if (config.survey_years.empty()) {
      throw Error(Error::Kind::config,
                  "partial pooling requires non-empty survey years");
    }
    for (int year : config.survey_years) {
      if (!panel.survey_years.contains(year)) {
        throw Error(Error::Kind::config,
                    "survey year " + std::to_string(year) +
                        " is not observed in the panel");
      }
    }
  }

  const auto timelines = collect_timelines(panel);

  // First pass: which rows survive the assignment rules.
  std::vector<const Observation*> kept;
  for (const auto& [household, timeline] : timelines) {
    if (timeline.first_treatment != kNoYear &&
        timeline.first_treatment < window.start) {
      throw Error(Error::Kind::rule_violation,
                  "household " + household + " recorded treated in " +
                      std::to_string(timeline.first_treatment) +
                      ", before the study window opens in " +
                      std::to_string(window.start));
    }
    if (timeline.first_adoption != kNoYear &&
        timeline.first_adoption < window.start) {
      log::info("household " + household + " adopted in " +
                std::to_string(timeline.first_adoption) +
                ", before the study window; excluded");
      continue;
    }
    const int cutoff =
        std::min(timeline.first_treatment, timeline.first_adoption);
    for (const auto* row : timeline.rows) {
      if (!window.contains(row->year)) continue;
      if (row->year > cutoff) continue;
      if (partial && !config.survey_years.contains(row->year)) continue;
      kept.push_back(row);
    }
  }

  if (kept.empty()) {
    throw Error(Error::Kind::degenerate_sample,
                "no observations survive the assignment rules");
  }

  const auto plan = plan_encoding(panel, config.covariate_subset, kept);

  MatchingSample sample{
      CovariateSchema(plan.sample_entries),
      {},
      partial ? Provenance::partial_pooling : Provenance::full_pooling,
      "",
      0};

  for (const auto* row : kept) {
    const auto& timeline = timelines.at(row->household_id);
    SampleUnit unit;
    unit.unit_id = row->household_id;
    unit.year = row->year;
    unit.village = row->village;
    unit.treated = (row->year == timeline.first_treatment);
    unit.outcome = row->outcome;
    unit.covariates.reserve(plan.columns.size());
    for (const auto& column : plan.columns) {
      const auto& cell = row->covariates[column.panel_index];
      if (column.one_hot) {
        unit.covariates.push_back(
            std::get<std::string>(cell) == column.level ? 1.0 : 0.0);
      } else {
        unit.covariates.push_back(std::get<double>(cell));
      }
    }
    sample.units.push_back(std::move(unit));
  }

  std::sort(sample.units.begin(), sample.units.end(),
            [](const SampleUnit& a, const SampleUnit& b) {
              if (a.unit_id != b.unit_id) return a.unit_id < b.unit_id;
              return a.year < b.year;
            });

  const std::size_t treated = sample.treated_count();
  if (treated == 0) {
    throw Error(Error::Kind::degenerate_sample,
                "sample has no treated units");
  }
  if (treated == sample.units.size()) {
    throw Error(Error::Kind::degenerate_sample,
                "sample has no control units");
  }
  sample.source_treated_count = treated;
  return sample;
}

}  // namespace

std::string_view to_string(Provenance provenance) {
  switch (provenance) {
    case Provenance::full_pooling: return "full_pooling";
    case Provenance::partial_pooling: return "partial_pooling";
    case Provenance::subset: return "subset";
  }
  return "subset";
}

std::size_t MatchingSample::treated_count() const {
  return static_cast<std::size_t>(
      std::count_if(units.begin(), units.end(),
                    [](const SampleUnit& u) { return u.treated; }));
}

std::size_t MatchingSample::control_count() const {
  return units.size() - treated_count();
}

MatchingSample build_full_pooling(const PanelDataset& panel,
                                  const PoolingConfig& config) {
  return build_pooled(panel, config, /*partial=*/false);
}

MatchingSample build_partial_pooling(const PanelDataset& panel,
                                     const PoolingConfig& config) {
  return build_pooled(panel, config, /*partial=*/true);
}

SampleFilter SampleFilter::by_year(int year) {
  SampleFilter filter;
  filter.kind = Kind::year;
  filter.year = year;
  return filter;
}

SampleFilter SampleFilter::by_village(std::string village) {
  SampleFilter filter;
  filter.kind = Kind::village;
  filter.village = std::move(village);
  return filter;
}

std::string SampleFilter::describe() const {
  return kind == Kind::year ? "year=" + std::to_string(year)
                            : "village=" + village;
}

MatchingSample subset_by(const MatchingSample& sample,
                         const SampleFilter& filter) {
  const auto matches = [&](const SampleUnit& unit) {
    return filter.kind == SampleFilter::Kind::year
               ? unit.year == filter.year
               : unit.village == filter.village;
  };
  if (std::none_of(sample.units.begin(), sample.units.end(), matches)) {
    throw Error(Error::Kind::lookup,
                "filter " + filter.describe() + " matches no unit");
  }

  MatchingSample out{sample.schema, {}, Provenance::subset,
                     "subset(" + filter.describe() + ") of " +
                         std::string(to_string(sample.provenance)),
                     0};
  for (const auto& unit : sample.units) {
    if (matches(unit)) out.units.push_back(unit);
  }
  const std::size_t treated = out.treated_count();
  if (treated == 0) {
    throw Error(Error::Kind::degenerate_sample,
                "subset " + filter.describe() + " has no treated units");
  }
  if (treated == out.units.size()) {
    throw Error(Error::Kind::degenerate_sample,
                "subset " + filter.describe() + " has no control units");
  }
  out.source_treated_count = treated;
  return out;
}

MatchingSample restrict_to_units(const MatchingSample& sample,
                                 const std::vector<std::uint32_t>& keep) {
  MatchingSample out{sample.schema,
                     {},
                     Provenance::subset,
                     "pruned subset of " +
                         std::string(to_string(sample.provenance)),
                     sample.source_treated_count};
  out.units.reserve(keep.size());
  for (const auto index : keep) {
    out.units.push_back(sample.units.at(index));
  }
  return out;
}

void write_sample_csv(std::ostream& out, const MatchingSample& sample) {
  out << "# provenance: " << to_string(sample.provenance);
  if (!sample.provenance_note.empty()) out << " (" << sample.provenance_note << ")";
  out << "\n";

  std::vector<std::string> header = {"unit_id", "year", "village", "treated",
                                     "outcome"};
  for (const auto& entry : sample.schema.entries()) header.push_back(entry.name);
  out << csv::join(header) << "\n";

  for (const auto& unit : sample.units) {
    std::vector<std::string> fields = {unit.unit_id, std::to_string(unit.year),
                                       unit.village, unit.treated ? "1" : "0",
                                       unit.outcome ? "1" : "0"};
    for (double value : unit.covariates) fields.push_back(csv::format_double(value));
    out << csv::join(fields) << "\n";
  }
}

}  // namespace fmatch
