#include "fmatch/pipeline.hpp"

#include <atomic>
#include <algorithm>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "fmatch/csv.hpp"
#include "fmatch/errors.hpp"
#include "fmatch/estimation.hpp"
#include "fmatch/log.hpp"

namespace fmatch {

namespace {

using nlohmann::json;

constexpr const char* kToolVersion = "0.1.0";

std::uint64_t fnv1a64(std::string_view text) {
  std::uint64_t hash = 1469598103934665603ull;
  for (const unsigned char c : text) {
    hash ^= c;
    hash *= 1099511628211ull;
  }
  return hash;
}

std::string hex64(std::uint64_t value) {
  char buffer[17];
  std::snprintf(buffer, sizeof(buffer), "%016llx",
                static_cast<unsigned long long>(value));
  return buffer;
}

std::string sanitize(std::string_view text) {
  std::string out;
  for (const char c : text) {
    out.push_back(std::isalnum(static_cast<unsigned char>(c)) ? c : '_');
  }
  return out;
}

json require(const json& node, const char* key) {
  if (!node.contains(key)) {
    throw Error(Error::Kind::config,
                std::string("config is missing '") + key + "'");
  }
  return node.at(key);
}

void write_text_file(const std::filesystem::path& path,
                     const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error(Error::Kind::io, "cannot open " + path.string() + " for writing");
  }
  out << content;
  if (!out) {
    throw Error(Error::Kind::io, "failed writing " + path.string());
  }
}

json to_json(const AttEstimate& estimate) {
  return json{{"att", estimate.att},
              {"std_error", estimate.std_error},
              {"p_value", att_p_value(estimate)},
              {"stars", significance_stars(att_p_value(estimate))},
              {"n_total", estimate.n_total},
              {"n_treated", estimate.n_treated},
              {"n_control", estimate.n_control},
              {"estimand", std::string(to_string(estimate.estimand))}};
}

json rows_to_json(const BalanceReport& report) {
  json rows = json::array();
  for (const auto& row : report.rows) {
    json entry{{"covariate", row.covariate},
               {"mean_control", row.mean_control},
               {"mean_treated", row.mean_treated}};
    if (row.p_value.has_value()) {
      entry["p_value"] = *row.p_value;
    } else {
      entry["p_value"] = nullptr;
    }
    entry["note"] = row.note;
    rows.push_back(std::move(entry));
  }
  return rows;
}

}  // namespace

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(Error::Kind::config, "cannot read config " + path.string());
  }
  json root;
  try {
    in >> root;
  } catch (const json::exception& error) {
    throw Error(Error::Kind::config,
                "config " + path.string() + " is not valid JSON: " + error.what());
  }

  const auto base_dir = path.has_parent_path()
                            ? path.parent_path()
                            : std::filesystem::path(".");
  const auto resolve = [&](const std::filesystem::path& p) {
    return p.is_absolute() ? p : base_dir / p;
  };

  RunConfig config;
  try {
    if (root.contains("input")) {
      config.input = resolve(root.at("input").get<std::string>());
    }
    if (root.contains("schema")) {
      for (const auto& entry : root.at("schema")) {
        CovariateEntry out;
        out.name = require(entry, "name").get<std::string>();
        out.kind = covariate_kind_from_string(
            require(entry, "kind").get<std::string>());
        out.units = entry.value("units", "");
        config.schema_entries.push_back(std::move(out));
      }
    }
    if (root.contains("study_window")) {
      config.study_window.start =
          require(root.at("study_window"), "start").get<int>();
      config.study_window.end =
          require(root.at("study_window"), "end").get<int>();
    }
    for (const auto& year : root.value("survey_years", json::array())) {
      config.survey_years.insert(year.get<int>());
    }
    config.drop_invalid_rows = root.value("drop_invalid_rows", false);
    config.alpha = root.value("alpha", 0.10);
    if (!(config.alpha > 0.0 && config.alpha < 1.0)) {
      throw Error(Error::Kind::config, "alpha must lie in (0, 1)");
    }

    for (const auto& node : root.value("samples", json::array())) {
      SampleSpec spec;
      spec.name = require(node, "name").get<std::string>();
      const auto pooling = require(node, "pooling").get<std::string>();
      if (pooling == "full") {
        spec.pooling = SampleSpec::Pooling::full;
      } else if (pooling == "partial") {
        spec.pooling = SampleSpec::Pooling::partial;
      } else {
        throw Error(Error::Kind::config,
                    "sample pooling must be 'full' or 'partial'");
      }
      for (const auto& name : require(node, "covariates")) {
        spec.covariates.push_back(name.get<std::string>());
      }
      config.samples.push_back(std::move(spec));
    }

    for (const auto& node : root.value("metrics", json::array())) {
      MetricSpec spec;
      const auto kind = require(node, "kind").get<std::string>();
      if (kind == "l1") {
        spec.kind = MetricKind::l1;
      } else if (kind == "ami") {
        spec.kind = MetricKind::ami;
      } else {
        throw Error(Error::Kind::config, "metric kind must be 'l1' or 'ami'");
      }
      spec.allow_treated_pruning = node.value("allow_treated_pruning", false);
      spec.reestimate_covariance = node.value("reestimate_covariance", false);
      spec.recoarsen_bins = node.value("recoarsen_bins", false);
      if (spec.kind == MetricKind::l1 && spec.allow_treated_pruning) {
        throw Error(Error::Kind::config, "the L1 frontier never prunes treated units");
      }
      spec.name = node.value(
          "name", kind == "l1"
                      ? std::string("l1")
                      : (spec.allow_treated_pruning ? std::string("ami")
                                                    : std::string("ami_noprune")));
      config.metrics.push_back(std::move(spec));
    }
    {
      std::set<std::string> metric_names;
      for (const auto& metric : config.metrics) {
        if (!metric_names.insert(metric.name).second) {
          throw Error(Error::Kind::config,
                      "duplicate metric label '" + metric.name +
                          "'; set distinct 'name' fields");
        }
      }
    }

    if (root.contains("binning")) {
      const auto& node = root.at("binning");
      config.binning.continuous_bins = node.value("continuous_bins", 10);
      if (config.binning.continuous_bins < 1) {
        throw Error(Error::Kind::config, "continuous_bins must be >= 1");
      }
      for (const auto& [name, edges] : node.value("fixed_edges", json::object()).items()) {
        std::vector<double> values;
        for (const auto& edge : edges) values.push_back(edge.get<double>());
        config.binning.fixed_edges[name] = std::move(values);
      }
    }

    if (root.contains("sweeps")) {
      config.sweeps.by_year = root.at("sweeps").value("by_year", false);
      config.sweeps.by_village = root.at("sweeps").value("by_village", false);
    }

    if (root.contains("describe")) {
      const auto& node = root.at("describe");
      for (const auto& series : node.value("series", json::array())) {
        SeriesSpec spec;
        spec.name = require(series, "name").get<std::string>();
        for (const auto& village : require(series, "villages")) {
          spec.villages.push_back(village.get<std::string>());
        }
        config.describe.series.push_back(std::move(spec));
      }
      for (const auto& cmp : node.value("comparisons", json::array())) {
        ComparisonSpec spec;
        spec.name = require(cmp, "name").get<std::string>();
        const auto split = require(cmp, "split").get<std::string>();
        if (split == "villages") {
          spec.split = ComparisonSpec::Split::villages;
          for (const auto& v : require(cmp, "villages_a")) {
            spec.villages_a.push_back(v.get<std::string>());
          }
          for (const auto& v : require(cmp, "villages_b")) {
            spec.villages_b.push_back(v.get<std::string>());
          }
        } else if (split == "treatment") {
          spec.split = ComparisonSpec::Split::treatment;
        } else {
          throw Error(Error::Kind::config,
                      "comparison split must be 'villages' or 'treatment'");
        }
        for (const auto& variable : require(cmp, "variables")) {
          spec.variables.push_back(variable.get<std::string>());
        }
        if (cmp.contains("year")) spec.year = cmp.at("year").get<int>();
        config.describe.comparisons.push_back(std::move(spec));
      }
      if (node.contains("thresholds")) {
        const auto& t = node.at("thresholds");
        config.describe.thresholds.innovator = t.value("innovator", 2.5);
        config.describe.thresholds.early_adopter = t.value("early_adopter", 16.0);
        config.describe.thresholds.early_majority = t.value("early_majority", 50.0);
        config.describe.thresholds.late_majority = t.value("late_majority", 84.0);
      }
    }

    if (root.contains("bootstrap")) {
      config.bootstrap.enabled = root.at("bootstrap").value("enabled", false);
      config.bootstrap.replicates = root.at("bootstrap").value("replicates", 200);
    }

    config.out = resolve(root.value("out", "results"));
    config.seed = root.value("seed", std::uint64_t{1});
    config.jobs = root.value("jobs", 1);
    if (config.jobs < 1) {
      throw Error(Error::Kind::config, "jobs must be >= 1");
    }

    if (root.contains("generator")) {
      const auto& node = root.at("generator");
      GeneratorConfig gen;
      gen.villages = node.value("villages", 4);
      gen.households_per_village = node.value("households_per_village", 60);
      if (node.contains("years")) {
        gen.years.start = require(node.at("years"), "start").get<int>();
        gen.years.end = require(node.at("years"), "end").get<int>();
      }
      gen.true_effect = node.value("true_effect", 0.5);
      gen.confounding = node.value("confounding", 1.2);
      gen.adoption_base = node.value("adoption_base", 0.05);
      gen.adoption_slope = node.value("adoption_slope", 0.08);
      gen.treatment_base_logit = node.value("treatment_base_logit", -3.0);
      gen.seed = config.seed;  // one seed drives every random draw
      config.generator = gen;
    }
  } catch (const json::exception& error) {
    throw Error(Error::Kind::config,
                std::string("malformed config value: ") + error.what());
  }

  config.canonical_json = root.dump();
  return config;
}

namespace {

PanelDataset load_panel(const RunConfig& config) {
  if (config.input.empty()) {
    throw Error(Error::Kind::config, "config has no 'input' path");
  }
  if (config.schema_entries.empty()) {
    throw Error(Error::Kind::config, "config has no 'schema'");
  }
  std::ifstream in(config.input, std::ios::binary);
  if (!in) {
    throw Error(Error::Kind::io, "cannot read input " + config.input.string());
  }
  ParseOptions options;
  options.drop_invalid_rows = config.drop_invalid_rows;
  PanelDataset panel =
      parse_dataset(in, CovariateSchema(config.schema_entries), options);
  if (!config.survey_years.empty()) panel.survey_years = config.survey_years;

  const auto report = validate(panel, config.study_window);
  if (!report.analysis_ready()) {
    throw Error(Error::Kind::validation,
                "input fails validation: " + std::to_string(report.errors.size()) +
                    " error(s); first: " + report.errors.front().message);
  }
  if (config.strict && !report.warnings.empty()) {
    throw Error(Error::Kind::validation,
                "strict mode: input has " +
                    std::to_string(report.warnings.size()) +
                    " warning(s); first: " + report.warnings.front().message);
  }
  return panel;
}

PoolingConfig pooling_of(const RunConfig& config, const SampleSpec& spec) {
  PoolingConfig pooling;
  pooling.study_window = config.study_window;
  pooling.survey_years = config.survey_years;
  pooling.covariate_subset = spec.covariates;
  return pooling;
}

MatchingSample build_sample(const PanelDataset& panel, const RunConfig& config,
                            const SampleSpec& spec) {
  const PoolingConfig pooling = pooling_of(config, spec);
  return spec.pooling == SampleSpec::Pooling::full
             ? build_full_pooling(panel, pooling)
             : build_partial_pooling(panel, pooling);
}

BinningSpec binning_spec_for(const MatchingSample& sample,
                             const BinningConfig& binning) {
  BinningSpec spec = BinningSpec::default_for(sample, binning.continuous_bins);
  for (std::size_t j = 0; j < sample.schema.size(); ++j) {
    const auto it = binning.fixed_edges.find(sample.schema.at(j).name);
    if (it == binning.fixed_edges.end()) continue;
    spec.rules[j].kind = BinningRule::Kind::fixed_edges;
    spec.rules[j].edges = it->second;
  }
  return spec;
}

struct CellPlan {
  const SampleSpec* sample_spec;
  const MetricSpec* metric;
  std::optional<SampleFilter> filter;  // nullopt = overall
  std::string filter_label;
};

void run_cell(const RunConfig& config, const MatchingSample& base,
              const CellPlan& plan, PipelineScope scope, CellResult& result) {
  std::filesystem::create_directories(result.dir);

  const MatchingSample sample =
      plan.filter.has_value() ? subset_by(base, *plan.filter) : base;

  Frontier frontier;
  std::shared_ptr<const CovarianceModel> cov;
  FrontierOptions options;
  options.recoarsen_bins = plan.metric->recoarsen_bins;
  options.reestimate_covariance = plan.metric->reestimate_covariance;

  if (plan.metric->kind == MetricKind::l1) {
    frontier = build_frontier_l1(sample, binning_spec_for(sample, config.binning),
                                 options);
  } else {
    cov = std::make_shared<const CovarianceModel>(estimate_covariance(sample));
    frontier = build_frontier_ami(sample, plan.metric->allow_treated_pruning,
                                  cov, options);
  }

  {
    std::ostringstream out;
    write_frontier_csv(out, frontier);
    write_text_file(result.dir / "frontier.csv", out.str());
  }
  if (cov != nullptr) {
    std::ostringstream out;
    write_covariance_csv(out, *cov, sample.schema);
    write_text_file(result.dir / "covariance.csv", out.str());
  }
  if (scope == PipelineScope::frontier_only) {
    result.ok = true;
    return;
  }

  const BalancedSelection selection =
      select_balanced_subset(frontier, sample, config.alpha);
  const MatchingSample matched =
      restrict_to_units(sample, frontier.remaining_at(selection.point_index));
  const AttEstimate att = estimate_att(matched);
  const AttEstimate unmatched = estimate_att(sample);
  const BalanceReport unmatched_report = balance_report(sample, config.alpha);

  json balance{{"alpha", config.alpha},
               {"balanced", selection.balanced},
               {"selected_point",
                json{{"pruned_count", selection.point.pruned_count},
                     {"imbalance", selection.point.imbalance},
                     {"remaining_n", sample.units.size() -
                                         selection.point.pruned_count},
                     {"treated_n", selection.point.treated_remaining},
                     {"control_n", selection.point.control_remaining}}},
               {"rows", rows_to_json(selection.report)},
               {"unmatched_rows", rows_to_json(unmatched_report)}};
  write_text_file(result.dir / "balance.json", balance.dump(2) + "\n");

  json att_json = to_json(att);
  att_json["metric"] = std::string(to_string(plan.metric->kind));
  att_json["allow_treated_pruning"] = plan.metric->allow_treated_pruning;
  att_json["selected_point"] = json{{"pruned_count", selection.point.pruned_count},
                                    {"imbalance", selection.point.imbalance}};
  att_json["balanced"] = selection.balanced;
  att_json["unmatched"] = to_json(unmatched);
  if (config.bootstrap.enabled) {
    const std::uint64_t seed =
        config.seed ^ fnv1a64(result.dir.string());
    att_json["bootstrap_std_error"] =
        bootstrap_std_error(matched, config.bootstrap.replicates, seed);
  } else {
    att_json["bootstrap_std_error"] = nullptr;
  }
  write_text_file(result.dir / "att.json", att_json.dump(2) + "\n");

  result.ok = true;
}

void write_descriptives(const RunConfig& config, const PanelDataset& panel,
                        const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);

  std::set<std::string> all_villages;
  for (const auto& row : panel.rows) all_villages.insert(row.village);

  // Per-village diffusion table.
  {
    std::ostringstream out;
    out << "village,first_adoption_year,level_start,level_end\n";
    std::map<std::string, int> first_by_village;
    for (const auto& row : panel.rows) {
      if (!row.outcome) continue;
      const auto [it, inserted] = first_by_village.emplace(row.village, row.year);
      if (!inserted && row.year < it->second) it->second = row.year;
    }
    for (const auto& village : all_villages) {
      const auto it = first_by_village.find(village);
      out << village << ","
          << (it == first_by_village.end() ? std::string()
                                           : std::to_string(it->second))
          << ","
          << csv::format_double(
                 diffusion_level(panel, village, config.study_window.start))
          << ","
          << csv::format_double(
                 diffusion_level(panel, village, config.study_window.end))
          << "\n";
    }
    write_text_file(dir / "diffusion_by_village.csv", out.str());
  }

  // Diffusion series: configured ones plus the all-villages default.
  {
    std::vector<SeriesSpec> series = config.describe.series;
    if (series.empty()) series.push_back({"all", {"*"}});
    std::ostringstream out;
    out << "series,year,share\n";
    for (const auto& spec : series) {
      std::set<std::string> villages;
      for (const auto& name : spec.villages) {
        if (name == "*") {
          villages = all_villages;
          break;
        }
        villages.insert(name);
      }
      const DiffusionSeries result = diffusion_series(panel, villages);
      for (const auto& point : result.points) {
        out << spec.name << "," << point.year << ","
            << csv::format_double(point.share) << "\n";
      }
    }
    write_text_file(dir / "diffusion_series.csv", out.str());
  }

  // Adopter categories over the full panel.
  {
    std::ostringstream out;
    out << "household_id,village,adoption_year,share_at_adoption,category\n";
    for (const auto& adoption :
         categorize_adopters(panel, all_villages, config.describe.thresholds)) {
      out << adoption.household_id << "," << adoption.village << ","
          << adoption.adoption_year << ","
          << csv::format_double(adoption.share_at_adoption) << ","
          << to_string(adoption.category) << "\n";
    }
    write_text_file(dir / "adopter_categories.csv", out.str());
  }

  // Fractionalization per village and dimension.
  {
    std::ostringstream out;
    out << "village,dimension,value\n";
    for (const auto& village : all_villages) {
      for (const auto dimension :
           {CultureDimension::ethnicity, CultureDimension::religion}) {
        const auto index = village_fractionalization(panel, village, dimension);
        out << village << ","
            << (dimension == CultureDimension::ethnicity ? "ethnicity"
                                                         : "religion")
            << "," << csv::format_double(index.value) << "\n";
      }
    }
    write_text_file(dir / "fractionalization.csv", out.str());
  }

  if (!config.describe.comparisons.empty()) {
    std::ostringstream out;
    out << "comparison,variable,mean_a,mean_b,p_value,note\n";
    for (const auto& spec : config.describe.comparisons) {
      GroupComparison comparison = [&] {
        if (spec.split == ComparisonSpec::Split::treatment) {
          return group_comparison(
              panel, [](const Observation& o) { return o.treated; },
              [](const Observation& o) { return !o.treated; }, "treated",
              "control", spec.variables, spec.year);
        }
        const std::set<std::string> a(spec.villages_a.begin(),
                                      spec.villages_a.end());
        const std::set<std::string> b(spec.villages_b.begin(),
                                      spec.villages_b.end());
        return group_comparison(
            panel,
            [a](const Observation& o) { return a.contains(o.village); },
            [b](const Observation& o) { return b.contains(o.village); },
            "villages_a", "villages_b", spec.variables, spec.year);
      }();
      for (const auto& row : comparison.rows) {
        out << spec.name << "," << row.variable << ","
            << csv::format_double(row.mean_a) << ","
            << csv::format_double(row.mean_b) << ","
            << (row.p_value.has_value() ? csv::format_double(*row.p_value)
                                        : std::string())
            << "," << row.note << "\n";
      }
    }
    write_text_file(dir / "comparisons.csv", out.str());
  }
}

}  // namespace

PipelineResult run_pipeline(const RunConfig& config, PipelineScope scope) {
  if (config.samples.empty()) {
    throw Error(Error::Kind::config, "config defines no samples");
  }
  if (config.metrics.empty()) {
    throw Error(Error::Kind::config, "config defines no metrics");
  }

  const PanelDataset panel = load_panel(config);
  std::filesystem::create_directories(config.out);

  // Base samples; a failure here is a data error, not a cell failure.
  std::map<std::string, MatchingSample> samples;
  for (const auto& spec : config.samples) {
    samples.emplace(spec.name, build_sample(panel, config, spec));
  }

  // Cell plans: overall plus configured sweeps.
  std::vector<CellPlan> plans;
  std::vector<CellResult> results;
  const bool sweeps = scope != PipelineScope::estimate_overall;
  for (const auto& sample_spec : config.samples) {
    const MatchingSample& base = samples.at(sample_spec.name);
    std::set<int> years;
    std::set<std::string> villages;
    for (const auto& unit : base.units) {
      years.insert(unit.year);
      villages.insert(unit.village);
    }
    for (const auto& metric : config.metrics) {
      std::vector<std::pair<std::optional<SampleFilter>, std::string>> filters;
      filters.emplace_back(std::nullopt, "all");
      if (sweeps && config.sweeps.by_year) {
        for (const int year : years) {
          filters.emplace_back(SampleFilter::by_year(year),
                               "year_" + std::to_string(year));
        }
      }
      if (sweeps && config.sweeps.by_village) {
        for (const auto& village : villages) {
          filters.emplace_back(SampleFilter::by_village(village),
                               "village_" + sanitize(village));
        }
      }
      for (auto& [filter, label] : filters) {
        CellPlan plan{&sample_spec, &metric, filter, label};
        CellResult result;
        result.sample = sample_spec.name;
        result.metric = metric.name;
        result.filter = label;
        result.dir = config.out / sample_spec.name / metric.name / label;
        plans.push_back(std::move(plan));
        results.push_back(std::move(result));
      }
    }
  }

  // Cells are independent; run them on the requested number of workers.
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    while (true) {
      const std::size_t index = next.fetch_add(1);
      if (index >= plans.size()) return;
      CellResult& result = results[index];
      try {
        run_cell(config, samples.at(plans[index].sample_spec->name),
                 plans[index], scope, result);
      } catch (const Error& error) {
        result.ok = false;
        result.note = error.what();
        log::warn("cell " + result.sample + "/" + result.metric + "/" +
                  result.filter + " failed: " + result.note);
      }
    }
  };
  if (config.jobs <= 1 || plans.size() <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    const int workers = std::min<int>(config.jobs, static_cast<int>(plans.size()));
    pool.reserve(static_cast<std::size_t>(workers));
    for (int i = 0; i < workers; ++i) pool.emplace_back(worker);
    for (auto& thread : pool) thread.join();
  }

  PipelineResult pipeline;
  pipeline.cells = results;
  for (const auto& cell : results) {
    if (!cell.ok) pipeline.exit_code = 3;
  }

  if (scope == PipelineScope::full_run) {
    write_descriptives(config, panel, config.out / "descriptives");

    json cells = json::array();
    for (const auto& cell : results) {
      cells.push_back(json{{"sample", cell.sample},
                           {"metric", cell.metric},
                           {"filter", cell.filter},
                           {"status", cell.ok ? "ok" : "failed"},
                           {"note", cell.note},
                           {"dir", std::filesystem::relative(cell.dir, config.out)
                                       .generic_string()}});
    }
    json manifest{{"tool", "frontier_match"},
                  {"version", kToolVersion},
                  {"config_hash", hex64(fnv1a64(config.canonical_json))},
                  {"alpha", config.alpha},
                  {"seed", config.seed},
                  {"cells", cells},
                  {"descriptives", "descriptives"}};
    write_text_file(config.out / "manifest.json", manifest.dump(2) + "\n");
  }
  return pipeline;
}

ValidationReport run_validate(const RunConfig& config) {
  if (config.input.empty() || config.schema_entries.empty()) {
    throw Error(Error::Kind::config, "config needs 'input' and 'schema'");
  }
  std::ifstream in(config.input, std::ios::binary);
  if (!in) {
    throw Error(Error::Kind::io, "cannot read input " + config.input.string());
  }
  ParseOptions options;
  options.drop_invalid_rows = config.drop_invalid_rows;
  PanelDataset panel =
      parse_dataset(in, CovariateSchema(config.schema_entries), options);
  if (!config.survey_years.empty()) panel.survey_years = config.survey_years;
  return validate(panel, config.study_window);
}

std::vector<std::filesystem::path> run_build_sample(const RunConfig& config) {
  const PanelDataset panel = load_panel(config);
  std::filesystem::create_directories(config.out);
  std::vector<std::filesystem::path> paths;
  for (const auto& spec : config.samples) {
    const MatchingSample sample = build_sample(panel, config, spec);
    std::ostringstream out;
    write_sample_csv(out, sample);
    const auto path = config.out / (spec.name + ".csv");
    write_text_file(path, out.str());
    paths.push_back(path);
  }
  return paths;
}

std::filesystem::path run_describe(const RunConfig& config) {
  const PanelDataset panel = load_panel(config);
  const auto dir = config.out / "descriptives";
  write_descriptives(config, panel, dir);
  return dir;
}

std::filesystem::path run_simulate(const RunConfig& config) {
  if (!config.generator.has_value()) {
    throw Error(Error::Kind::config, "config has no 'generator' block");
  }
  const PanelDataset panel = simulate_panel(*config.generator);
  std::filesystem::create_directories(config.out);
  std::ostringstream out;
  write_dataset(out, panel);
  const auto path = config.out / "panel.csv";
  write_text_file(path, out.str());
  return path;
}

}  // namespace fmatch
