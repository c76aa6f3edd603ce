#ifndef FMATCH_PIPELINE_HPP
#define FMATCH_PIPELINE_HPP

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fmatch/data_model.hpp"
#include "fmatch/descriptives.hpp"
#include "fmatch/frontier.hpp"
#include "fmatch/sample_builder.hpp"
#include "fmatch/simulate.hpp"

namespace fmatch {

struct SampleSpec {
  std::string name;
  enum class Pooling { full, partial } pooling = Pooling::full;
  std::vector<std::string> covariates;
};

struct MetricSpec {
  std::string name;  // cell label; defaults to the kind
  MetricKind kind = MetricKind::ami;
  bool allow_treated_pruning = false;
  bool reestimate_covariance = false;
  bool recoarsen_bins = false;
};

struct BinningConfig {
  int continuous_bins = 10;
  std::map<std::string, std::vector<double>> fixed_edges;  // by covariate name
};

struct SweepConfig {
  bool by_year = false;
  bool by_village = false;
};

struct SeriesSpec {
  std::string name;
  std::vector<std::string> villages;  // "*" means every village
};

struct ComparisonSpec {
  std::string name;
  enum class Split { villages, treatment } split = Split::villages;
  std::vector<std::string> villages_a;  // split == villages
  std::vector<std::string> villages_b;
  std::vector<std::string> variables;
  std::optional<int> year;
};

struct DescribeConfig {
  std::vector<SeriesSpec> series;
  std::vector<ComparisonSpec> comparisons;
  CategoryThresholds thresholds;
};

struct BootstrapConfig {
  bool enabled = false;
  int replicates = 200;
};

struct RunConfig {
  std::filesystem::path input;
  std::vector<CovariateEntry> schema_entries;
  YearWindow study_window{0, 0};
  std::set<int> survey_years;
  bool drop_invalid_rows = false;
  double alpha = 0.10;
  std::vector<SampleSpec> samples;
  std::vector<MetricSpec> metrics;
  BinningConfig binning;
  SweepConfig sweeps;
  DescribeConfig describe;
  BootstrapConfig bootstrap;
  std::filesystem::path out;
  std::uint64_t seed = 1;
  int jobs = 1;
  bool strict = false;
  std::optional<GeneratorConfig> generator;

  std::string canonical_json;  // re-serialized config, hashed into manifests
};

/// Reads and checks a JSON run configuration. Relative input/out paths are
/// resolved against the config file's directory. Throws Error{config}.
RunConfig load_run_config(const std::filesystem::path& path);

struct CellResult {
  std::string sample;
  std::string metric;
  std::string filter;
  bool ok = false;
  std::string note;
  std::filesystem::path dir;
};

struct PipelineResult {
  std::vector<CellResult> cells;
  int exit_code = 0;  // 0 ok, 3 when any cell failed
};

enum class PipelineScope {
  frontier_only,     // frontier csv per cell, sweeps honored
  estimate_overall,  // full cell outputs, no sweeps, no manifest
  full_run,          // sweeps + descriptives + manifest
};

/// Ingests the input, builds the configured samples, and runs one cell per
/// (sample x metric x filter): frontier CSV, balance report JSON, ATT JSON,
/// and for AMI cells the covariance audit CSV. Cell failures are isolated
/// and recorded; the manifest is written last.
PipelineResult run_pipeline(const RunConfig& config,
                            PipelineScope scope = PipelineScope::full_run);

/// Parses and validates the configured input; returns the report.
ValidationReport run_validate(const RunConfig& config);

/// Writes the configured samples as CSV, returns the paths.
std::vector<std::filesystem::path> run_build_sample(const RunConfig& config);

/// Writes the descriptive tables (diffusion, categories, fractionalization,
/// comparisons) under out/descriptives.
std::filesystem::path run_describe(const RunConfig& config);

/// Writes a generated panel to out/panel.csv.
std::filesystem::path run_simulate(const RunConfig& config);

}  // namespace fmatch

#endif  // FMATCH_PIPELINE_HPP
