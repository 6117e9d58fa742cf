#pragma once

#include <string>
#include <vector>

#include "strata/run_config.hpp"

namespace strata {

inline constexpr const char* kVersion = "0.1.0";

/// Outcome of one experiment bundle.
struct ExperimentReport {
  std::string bundle_dir;
  bool reference_reused = false;  // fine-step/intrinsic reference loaded from cache
  long long rejections = 0;
};

/// Run one configured experiment: every (algorithm, dt) ensemble plus the
/// reference, then write under cfg.output_dir:
///   timeseries.csv   time,algorithm,dt,observable,mean,sigma,constraint_err,reference
///   error_table.csv  manifold,observable,dt,algorithm,max_truncation_error,max_constraint_error
///   manifest.json    full config, seed, version, rejection counters
/// Output bytes are a pure function of (config, seed).
ExperimentReport run_experiment(const RunConfig& cfg);

/// Compute and write only the reference series (reference.csv, same schema
/// as timeseries.csv with reference=true).
ExperimentReport run_reference(const RunConfig& cfg);

/// Emit per-figure CSVs (fig_<manifold>_<algorithm>.csv with columns
/// time,mean,sigma_lo,sigma_hi,exact) from a completed bundle. Returns the
/// emitted paths; empty algorithm list yields none.
std::vector<std::string> emit_plot_data(const std::string& bundle_dir);

/// Serialize a double with 17 significant digits (round-trip exact).
std::string format_double(double v);

}  // namespace strata
