#include "strata/ensemble.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <optional>
#include <sstream>
#include <thread>

namespace strata {

int resolve_workers(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("STRATA_WORKERS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return hc > 0 ? static_cast<int>(hc) : 1;
}

namespace {

struct ChunkAccum {
  long long first = 0;
  long long count = 0;
  // sums laid out [n_out x (n_obs + 1)]; last column is the constraint residual
  std::vector<double> sums;
  long long rejections = 0;
  std::optional<TrajectoryFailure> failure;
};

struct GridPlan {
  long long steps = 0;
  std::vector<long long> record_steps;  // ascending, starts at 0, ends at steps
};

GridPlan make_grid(double dt, double t_max, const EnsembleOptions& opt) {
  GridPlan g;
  const double raw = t_max / dt;
  g.steps = static_cast<long long>(std::llround(raw));
  if (g.steps < 1 || std::abs(raw - static_cast<double>(g.steps)) > 1e-9 * raw + 1e-12) {
    throw InvalidStateError("integrate_ensemble: t_max/dt is not a whole number of steps");
  }
  if (!opt.output_steps.empty()) {
    g.record_steps = opt.output_steps;
    if (g.record_steps.front() != 0 || g.record_steps.back() != g.steps) {
      throw InvalidStateError("integrate_ensemble: output_steps must span [0, steps]");
    }
    return g;
  }
  const long long stride = std::max<long long>(1, g.steps / std::max(1, opt.output_points));
  for (long long s = 0; s < g.steps; s += stride) g.record_steps.push_back(s);
  g.record_steps.push_back(g.steps);
  return g;
}

}  // namespace

EnsembleResult integrate_ensemble(const SdeProblem& problem, const StepConfig& cfg,
                                  long long n_traj, double t_max,
                                  const std::vector<Observable>& observables,
                                  std::uint64_t seed,
                                  const EnsembleOptions& options) {
  if (n_traj < 1) throw InvalidStateError("integrate_ensemble: n_traj must be >= 1");
  if (cfg.dt <= 0.0) throw ConfigError("dt", "dt must be positive");

  const GridPlan grid = make_grid(cfg.dt, t_max, options);
  const int n_out = static_cast<int>(grid.record_steps.size());
  const int n_obs = static_cast<int>(observables.size());
  const bool has_manifold = problem.manifold.has_value();
  const bool mapped = static_cast<bool>(options.state_map);
  const int cols = n_obs + 1;

  const int n_chunks = std::max(1, options.n_chunks);
  std::vector<ChunkAccum> chunks(n_chunks);
  for (int c = 0; c < n_chunks; ++c) {
    chunks[c].first = n_traj * c / n_chunks;
    chunks[c].count = n_traj * (c + 1) / n_chunks - chunks[c].first;
    chunks[c].sums.assign(static_cast<size_t>(n_out) * cols, 0.0);
  }

  std::atomic<int> next_chunk{0};

  auto worker_fn = [&]() {
    detail::StepperWorkspace ws;
    const int pdim = has_manifold ? problem.manifold->num_constraints : 0;
    ws.resize(problem.dim, problem.noise_dim, pdim);
    Vec state(problem.dim), dw(problem.noise_dim), next(problem.dim);
    Vec mapped_state(mapped ? 0 : problem.dim);
    Vec fval(pdim > 0 ? pdim : 1);
    std::vector<double> traj_buf(static_cast<size_t>(n_out) * cols);

    for (;;) {
      const int c = next_chunk.fetch_add(1);
      if (c >= n_chunks) break;
      ChunkAccum& acc = chunks[c];
      for (long long j = 0; j < acc.count; ++j) {
        const long long traj = acc.first + j;
        int retry = 0;
        bool done = false;
        while (!done) {
          NoisePlan plan{seed, static_cast<std::uint64_t>(traj) +
                                   static_cast<std::uint64_t>(retry) *
                                       static_cast<std::uint64_t>(n_traj)};
          state = problem.initial_state;
          std::fill(traj_buf.begin(), traj_buf.end(), 0.0);
          size_t rec = 0;
          bool rejected = false;
          for (long long k = 0; k <= grid.steps; ++k) {
            if (k > 0) {
              gaussian_increments(plan, static_cast<std::uint64_t>(k - 1),
                                  problem.noise_dim, cfg.dt, dw);
              const double t0 = (k - 1) * cfg.dt;
              try {
                detail::step_dispatch(problem, state, t0, cfg, dw, ws, next);
              } catch (const DivergenceError& e) {
                if (!acc.failure) {
                  acc.failure.emplace(traj, k - 1, e.what());
                }
                done = true;
                break;
              }
              state.swap(next);
              if (!state.allFinite()) {
                rejected = true;  // blown-up trajectory: restart on a new stream
                break;
              }
              for (const GuardBand& gb : options.guards) {
                const double v = state[gb.coord];
                if (!(v > gb.lo && v < gb.hi)) {
                  rejected = true;
                  break;
                }
              }
              if (rejected) break;
            }
            if (rec < grid.record_steps.size() &&
                grid.record_steps[rec] == k) {
              const Vec* obs_state = &state;
              if (mapped) {
                options.state_map(state, mapped_state);
                obs_state = &mapped_state;
              }
              double* row = traj_buf.data() + rec * cols;
              for (int o = 0; o < n_obs; ++o) row[o] = observables[o].fn(*obs_state);
              if (has_manifold) {
                problem.manifold->constraint_eval(state, fval);
                row[n_obs] = fval.cwiseAbs().maxCoeff();
              }
              ++rec;
            }
          }
          if (acc.failure) break;
          if (rejected) {
            ++acc.rejections;
            ++retry;
            if (retry > options.guard_retry_cap) {
              acc.failure.emplace(traj, -1,
                                  "guard-band retry cap exceeded; trajectory cannot "
                                  "stay clear of the singular set");
              break;
            }
            continue;
          }
          // merge the finished trajectory into the chunk sums
          for (size_t i = 0; i < traj_buf.size(); ++i) acc.sums[i] += traj_buf[i];
          done = true;
        }
        if (acc.failure) break;
      }
    }
  };

  const int n_workers = std::min<long long>(resolve_workers(options.workers),
                                            static_cast<long long>(n_chunks));
  if (n_workers <= 1) {
    worker_fn();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_workers);
    for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker_fn);
    for (auto& th : pool) th.join();
  }

  // Deterministic failure report: smallest trajectory index wins.
  const TrajectoryFailure* worst = nullptr;
  for (const auto& c : chunks) {
    if (c.failure && (!worst || c.failure->trajectory() < worst->trajectory())) {
      worst = &*c.failure;
    }
  }
  if (worst) throw *worst;

  EnsembleResult res;
  res.n_traj = n_traj;
  res.seed = seed;
  res.times.resize(n_out);
  for (int i = 0; i < n_out; ++i) res.times[i] = grid.record_steps[i] * cfg.dt;
  res.observable_names.reserve(n_obs);
  for (const auto& o : observables) res.observable_names.push_back(o.name);
  res.means = Mat::Zero(n_obs, n_out);
  res.sigmas = Mat::Zero(n_obs, n_out);
  res.constraint_mean = Vec::Zero(n_out);

  // totals in fixed chunk order
  std::vector<double> total(static_cast<size_t>(n_out) * cols, 0.0);
  for (const auto& c : chunks) {
    for (size_t i = 0; i < total.size(); ++i) total[i] += c.sums[i];
    res.rejections += c.rejections;
  }
  for (int i = 0; i < n_out; ++i) {
    for (int o = 0; o < n_obs; ++o) {
      res.means(o, i) = total[static_cast<size_t>(i) * cols + o] / n_traj;
    }
    res.constraint_mean[i] = total[static_cast<size_t>(i) * cols + n_obs] / n_traj;
  }

  // batch sampling errors: group chunks into n_batches fixed sub-ensembles
  const int n_batches = std::max(1, options.n_batches);
  std::vector<double> bsum(static_cast<size_t>(n_out) * cols);
  std::vector<std::vector<double>> batch_means;
  batch_means.reserve(n_batches);
  for (int b = 0; b < n_batches; ++b) {
    std::fill(bsum.begin(), bsum.end(), 0.0);
    const int c0 = n_chunks * b / n_batches;
    const int c1 = n_chunks * (b + 1) / n_batches;
    long long cnt = 0;
    for (int c = c0; c < c1; ++c) {
      for (size_t i = 0; i < bsum.size(); ++i) bsum[i] += chunks[c].sums[i];
      cnt += chunks[c].count;
    }
    if (cnt == 0) continue;
    std::vector<double> bm(bsum.size());
    for (size_t i = 0; i < bsum.size(); ++i) bm[i] = bsum[i] / cnt;
    batch_means.push_back(std::move(bm));
  }
  const int kb = static_cast<int>(batch_means.size());
  if (kb >= 2) {
    for (int i = 0; i < n_out; ++i) {
      for (int o = 0; o < n_obs; ++o) {
        const size_t idx = static_cast<size_t>(i) * cols + o;
        double mean = 0.0;
        for (int b = 0; b < kb; ++b) mean += batch_means[b][idx];
        mean /= kb;
        double ss = 0.0;
        for (int b = 0; b < kb; ++b) {
          const double d = batch_means[b][idx] - mean;
          ss += d * d;
        }
        res.sigmas(o, i) = std::sqrt(ss / (kb - 1)) / std::sqrt(static_cast<double>(kb));
      }
    }
  }
  return res;
}

}  // namespace strata
