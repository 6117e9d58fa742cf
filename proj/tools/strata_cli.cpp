// Batch experiment runner for projected stochastic differential equations.
//
//   strata run <config>        run every experiment section in the config
//   strata reference <config>  compute and cache only the reference series
//   strata plotdata <bundle>   emit per-figure CSVs from a finished bundle
//
// Exit codes: 0 success, 2 configuration error, 3 numerical divergence.

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>

#include "strata/experiment.hpp"

namespace {

int run_verb(const std::string& config_path, int workers, bool reference_only) {
  std::vector<strata::RunConfig> runs;
  try {
    runs = strata::parse_config_file(config_path);
  } catch (const strata::ConfigError& e) {
    std::cerr << "config error: field '" << e.field() << "': " << e.what() << "\n";
    return 2;
  }
  for (auto& cfg : runs) {
    if (workers > 0) cfg.workers = workers;
    try {
      const strata::ExperimentReport report =
          reference_only ? strata::run_reference(cfg) : strata::run_experiment(cfg);
      std::cout << (reference_only ? "reference" : "run") << " '" << cfg.name
                << "' -> " << report.bundle_dir;
      if (report.reference_reused) std::cout << " (reference cache hit)";
      if (report.rejections > 0) {
        std::cout << " [" << report.rejections << " guard rejections]";
      }
      std::cout << "\n";
    } catch (const strata::ConfigError& e) {
      std::cerr << "config error: field '" << e.field() << "': " << e.what() << "\n";
      return 2;
    } catch (const strata::TrajectoryFailure& e) {
      std::cerr << "numerical divergence in run '" << cfg.name << "': trajectory "
                << e.trajectory() << ", step " << e.step() << ": " << e.what()
                << "\n";
      return 3;
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stratonovich SDE projection benchmarks on constraint manifolds"};
  app.require_subcommand(1);

  std::string config_path;
  std::string bundle_dir;
  int workers = 0;

  auto* run_cmd = app.add_subcommand("run", "run the experiments in a config file");
  run_cmd->add_option("config", config_path, "run configuration file")->required();
  run_cmd->add_option("--workers", workers, "worker thread override");

  auto* ref_cmd =
      app.add_subcommand("reference", "compute only the reference series");
  ref_cmd->add_option("config", config_path, "run configuration file")->required();
  ref_cmd->add_option("--workers", workers, "worker thread override");

  auto* plot_cmd =
      app.add_subcommand("plotdata", "emit plot-ready per-figure CSV files");
  plot_cmd->add_option("bundle", bundle_dir, "bundle directory from a run")->required();

  CLI11_PARSE(app, argc, argv);

  if (run_cmd->parsed()) return run_verb(config_path, workers, false);
  if (ref_cmd->parsed()) return run_verb(config_path, workers, true);

  // plotdata
  try {
    const auto files = strata::emit_plot_data(bundle_dir);
    if (files.empty()) {
      std::cerr << "warning: no algorithms in bundle; nothing to emit\n";
      return 0;
    }
    for (const auto& f : files) std::cout << f << "\n";
    return 0;
  } catch (const strata::ConfigError& e) {
    std::cerr << "config error: field '" << e.field() << "': " << e.what() << "\n";
    return 2;
  }
}
