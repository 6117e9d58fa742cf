#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "strata/stepper.hpp"
#include "strata/types.hpp"

namespace strata {

/// Pure map from a (possibly embedded) state to a scalar.
struct Observable {
  std::string name;
  std::function<double(const Vec&)> fn;
};

/// Reject-and-resample band for intrinsic coordinates: a trajectory whose
/// `coord` leaves (lo, hi) is restarted on a fresh noise stream.
struct GuardBand {
  int coord = 0;
  double lo = -1e300;
  double hi = 1e300;
};

struct EnsembleOptions {
  int workers = 0;          // 0: STRATA_WORKERS env var, else hardware count
  int output_points = 50;   // target number of grid intervals over [0, t_max]
  int n_chunks = 40;        // fixed-order reduction granularity
  int n_batches = 10;       // sub-ensembles for the sampling-error estimate
  int guard_retry_cap = 100;
  std::function<void(const Vec&, Vec&)> state_map;  // e.g. intrinsic embedding
  std::vector<GuardBand> guards;
  // When non-empty, record exactly these step indices (must include 0 and the
  // final step); overrides output_points. Used to align reference grids.
  std::vector<long long> output_steps;
};

/// Ensemble means, batch sampling errors and constraint residuals on the
/// output time grid. Bit-identical for a fixed seed across worker counts.
struct EnsembleResult {
  std::vector<double> times;
  std::vector<std::string> observable_names;
  Mat means;             // n_obs x n_times
  Mat sigmas;            // batch std / sqrt(n_batches)
  Vec constraint_mean;   // <max_j |f^j|> per time; zero without a manifold
  long long n_traj = 0;
  std::uint64_t seed = 0;
  long long rejections = 0;
};

/// A trajectory aborted the run (normal-projection divergence).
class TrajectoryFailure : public std::runtime_error {
 public:
  TrajectoryFailure(long long trajectory, long long step, const std::string& what)
      : std::runtime_error(what), trajectory_(trajectory), step_(step) {}
  long long trajectory() const noexcept { return trajectory_; }
  long long step() const noexcept { return step_; }

 private:
  long long trajectory_;
  long long step_;
};

/// Integrate n_traj independent trajectories to t_max and reduce the
/// observables on the output grid. t_max/cfg.dt must be a whole number of
/// steps. Deterministic for fixed (seed, config) regardless of worker count.
EnsembleResult integrate_ensemble(const SdeProblem& problem, const StepConfig& cfg,
                                  long long n_traj, double t_max,
                                  const std::vector<Observable>& observables,
                                  std::uint64_t seed,
                                  const EnsembleOptions& options = {});

/// Resolve the worker count: explicit option, then STRATA_WORKERS, then
/// hardware concurrency.
int resolve_workers(int requested);

}  // namespace strata
