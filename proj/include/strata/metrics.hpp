#pragma once

#include <map>
#include <string>
#include <vector>

#include "strata/ensemble.hpp"
#include "strata/manifolds.hpp"

namespace strata {

double euclidean_dist_sq(const Vec& x, const Vec& y);

/// Great-circle distance Theta(x, y) = acos(x^T G y), argument clamped to
/// [-1, 1] so roundoff near coincident points cannot produce NaN.
double great_circle_dist(const Vec& x, const Vec& y, const Mat& g);

/// Signed per-time truncation error e(t) = series(t) - reference(t) plus its
/// maximum magnitude. Throws InvalidStateError on grid-length mismatch.
struct TruncationError {
  std::vector<double> signed_error;
  double max_abs = 0.0;
};
TruncationError truncation_error(const std::vector<double>& series,
                                 const std::vector<double>& reference);

/// How the reference series is obtained.
enum class ReferenceMode {
  Auto,      // oracle if present, else intrinsic if present, else fine-step
  Oracle,    // closed form on the grid
  Intrinsic, // unconstrained midpoint on the intrinsic model at dt/5
  FineStep,  // cMP at dt/5
};
std::string to_string(ReferenceMode m);
ReferenceMode reference_mode_from_string(const std::string& name);

/// One error-table row: maxima over the output grid.
struct ErrorTable {
  struct Row {
    std::string observable;
    double dt = 0.0;
    std::string algorithm;
    double max_truncation = 0.0;
    double max_constraint = 0.0;
  };
  std::vector<Row> rows;
  // reproduction metadata
  std::string manifold;
  std::map<std::string, double> params;
  long long n_traj = 0;
  double t_max = 0.0;
  std::uint64_t seed = 0;
};

/// A reference series with its own sampling error (zero for oracles).
struct ReferenceSeries {
  std::vector<double> times;
  std::vector<double> mean;
  std::vector<double> sigma;
  std::string kind;  // "oracle" | "intrinsic" | "fine-step"
};

struct ErrorTableOptions {
  int midpoint_iters = 3;
  int normal_iters = 3;
  EnsembleOptions ensemble;
  bool shared_streams = false;       // common random numbers across algorithms
  double reference_traj_factor = 1.0;  // n_traj multiplier for simulated references
};

/// Runs + references + assembled table for one manifold.
struct ErrorTableResult {
  ErrorTable table;
  // keyed by algorithm name then dt index aligned with dt_list
  std::map<std::string, std::vector<EnsembleResult>> runs;
  // keyed by observable name then dt index
  std::map<std::string, std::vector<ReferenceSeries>> references;
  std::vector<double> dt_list;
};

/// Run every (algorithm, dt) ensemble for the entry, build the reference per
/// the mode hierarchy, and assemble the per-row maxima.
ErrorTableResult build_error_table(const CatalogEntry& entry,
                                   const std::vector<Algorithm>& algorithms,
                                   const std::vector<double>& dt_list,
                                   long long n_traj, double t_max,
                                   std::uint64_t seed, ReferenceMode mode,
                                   const ErrorTableOptions& options = {});

/// Reference series for one dt (used standalone by the CLI `reference` verb).
ReferenceSeries compute_reference(const CatalogEntry& entry,
                                  const std::string& observable, double dt,
                                  long long n_traj, double t_max,
                                  std::uint64_t seed, ReferenceMode mode,
                                  const ErrorTableOptions& options = {});

/// Reference evaluated on an explicit time grid (grid times must be integer
/// multiples of dt/5 for the simulated modes).
ReferenceSeries compute_reference_on_grid(const CatalogEntry& entry,
                                          const std::string& observable,
                                          const std::vector<double>& grid_times,
                                          double dt, long long n_traj, double t_max,
                                          std::uint64_t seed, ReferenceMode mode,
                                          const ErrorTableOptions& options = {});

}  // namespace strata
