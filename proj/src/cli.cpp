#include "fmatch/cli.hpp"

#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "fmatch/errors.hpp"
#include "fmatch/log.hpp"
#include "fmatch/pipeline.hpp"

namespace fmatch {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfigError = 1;
constexpr int kExitDataError = 2;

struct CommonFlags {
  std::string config_path;
  std::string out_override;
  std::uint64_t seed_override = 0;
  int jobs_override = 0;
  bool strict = false;
};

void add_common(CLI::App* command, CommonFlags& flags) {
  command->add_option("--config", flags.config_path, "run configuration JSON")
      ->required();
  command->add_option("--out", flags.out_override, "output directory override");
  command->add_option("--seed", flags.seed_override, "seed override");
  command->add_option("--jobs", flags.jobs_override, "parallel cells");
  command->add_flag("--strict", flags.strict, "fail on warnings");
}

RunConfig load_with_overrides(const CommonFlags& flags, const CLI::App* parsed) {
  RunConfig config = load_run_config(flags.config_path);
  if (parsed->count("--out") > 0) config.out = flags.out_override;
  if (parsed->count("--seed") > 0) {
    config.seed = flags.seed_override;
    if (config.generator.has_value()) config.generator->seed = config.seed;
  }
  if (parsed->count("--jobs") > 0) config.jobs = flags.jobs_override;
  config.strict = config.strict || flags.strict;
  return config;
}

void print_cells(const PipelineResult& result) {
  for (const auto& cell : result.cells) {
    std::cout << cell.sample << "/" << cell.metric << "/" << cell.filter << ": "
              << (cell.ok ? "ok" : "failed: " + cell.note) << "\n";
  }
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"matching-frontier analysis pipeline"};
  app.require_subcommand(1);

  CommonFlags flags;
  auto* cmd_validate = app.add_subcommand(
      "validate", "parse the input and report invariant violations");
  auto* cmd_build = app.add_subcommand(
      "build-sample", "write the configured matching samples");
  auto* cmd_frontier = app.add_subcommand(
      "frontier", "build frontiers and write their CSVs");
  auto* cmd_estimate = app.add_subcommand(
      "estimate", "frontier, balance and ATT for the overall cells");
  auto* cmd_describe = app.add_subcommand(
      "describe", "diffusion, categories and comparison tables");
  auto* cmd_simulate = app.add_subcommand(
      "simulate", "write a synthetic panel from the generator block");
  auto* cmd_run =
      app.add_subcommand("run", "full pipeline with sweeps and manifest");
  for (auto* command : {cmd_validate, cmd_build, cmd_frontier, cmd_estimate,
                        cmd_describe, cmd_simulate, cmd_run}) {
    add_common(command, flags);
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& error) {
    if (error.get_exit_code() == 0) {  // --help
      std::cout << app.help();
      return kExitOk;
    }
    std::cerr << error.what() << "\n";
    return kExitConfigError;
  }

  const CLI::App* parsed = app.get_subcommands().front();
  try {
    const RunConfig config = load_with_overrides(flags, parsed);

    if (cmd_validate->parsed()) {
      const ValidationReport report = run_validate(config);
      for (const auto& issue : report.errors) {
        std::cout << "error: row " << issue.row_index << ": " << issue.message
                  << "\n";
      }
      for (const auto& issue : report.warnings) {
        std::cout << "warning: row " << issue.row_index << ": " << issue.message
                  << "\n";
      }
      std::cout << report.errors.size() << " error(s), "
                << report.warnings.size() << " warning(s)\n";
      if (!report.analysis_ready()) return kExitDataError;
      if (config.strict && !report.warnings.empty()) return kExitDataError;
      return kExitOk;
    }
    if (cmd_build->parsed()) {
      for (const auto& path : run_build_sample(config)) {
        std::cout << path.string() << "\n";
      }
      return kExitOk;
    }
    if (cmd_frontier->parsed()) {
      const PipelineResult result =
          run_pipeline(config, PipelineScope::frontier_only);
      print_cells(result);
      return result.exit_code;
    }
    if (cmd_estimate->parsed()) {
      const PipelineResult result =
          run_pipeline(config, PipelineScope::estimate_overall);
      print_cells(result);
      return result.exit_code;
    }
    if (cmd_describe->parsed()) {
      std::cout << run_describe(config).string() << "\n";
      return kExitOk;
    }
    if (cmd_simulate->parsed()) {
      std::cout << run_simulate(config).string() << "\n";
      return kExitOk;
    }
    const PipelineResult result = run_pipeline(config, PipelineScope::full_run);
    print_cells(result);
    return result.exit_code;
  } catch (const Error& error) {
    std::cerr << "error: " << error.what() << "\n";
    return error.kind() == Error::Kind::config ? kExitConfigError
                                               : kExitDataError;
  } catch (const std::exception& error) {
    std::cerr << "error: " << error.what() << "\n";
    return kExitDataError;
  }
}

}  // namespace fmatch
