#include "strata/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace strata {

double euclidean_dist_sq(const Vec& x, const Vec& y) { return (x - y).squaredNorm(); }

double great_circle_dist(const Vec& x, const Vec& y, const Mat& g) {
  double q = x.dot(g * y);
  q = std::min(1.0, std::max(-1.0, q));
  return std::acos(q);
}

TruncationError truncation_error(const std::vector<double>& series,
                                 const std::vector<double>& reference) {
  if (series.size() != reference.size()) {
    throw InvalidStateError("truncation_error: series and reference grids differ");
  }
  TruncationError out;
  out.signed_error.resize(series.size());
  for (size_t i = 0; i < series.size(); ++i) {
    out.signed_error[i] = series[i] - reference[i];
    out.max_abs = std::max(out.max_abs, std::abs(out.signed_error[i]));
  }
  return out;
}

std::string to_string(ReferenceMode m) {
  switch (m) {
    case ReferenceMode::Auto: return "auto";
    case ReferenceMode::Oracle: return "oracle";
    case ReferenceMode::Intrinsic: return "intrinsic";
    case ReferenceMode::FineStep: return "fine-step";
  }
  return "?";
}

ReferenceMode reference_mode_from_string(const std::string& name) {
  if (name == "auto") return ReferenceMode::Auto;
  if (name == "oracle") return ReferenceMode::Oracle;
  if (name == "intrinsic") return ReferenceMode::Intrinsic;
  if (name == "fine-step" || name == "fine_step") return ReferenceMode::FineStep;
  throw ConfigError("reference", "unknown reference mode '" + name + "'");
}

namespace {

ReferenceMode resolve_mode(const CatalogEntry& entry, const std::string& observable,
                           ReferenceMode mode) {
  if (mode != ReferenceMode::Auto) return mode;
  if (entry.oracles.count(observable)) return ReferenceMode::Oracle;
  if (entry.intrinsic.has_value()) return ReferenceMode::Intrinsic;
  return ReferenceMode::FineStep;
}

std::vector<long long> scaled_steps(const std::vector<double>& times, double dt_ref) {
  std::vector<long long> steps(times.size());
  for (size_t i = 0; i < times.size(); ++i) {
    steps[i] = static_cast<long long>(std::llround(times[i] / dt_ref));
  }
  return steps;
}

int observable_index(const EnsembleResult& r, const std::string& name) {
  for (size_t i = 0; i < r.observable_names.size(); ++i) {
    if (r.observable_names[i] == name) return static_cast<int>(i);
  }
  throw InvalidStateError("observable '" + name + "' missing from ensemble result");
}

}  // namespace

ReferenceSeries compute_reference_on_grid(const CatalogEntry& entry,
                                          const std::string& observable,
                                          const std::vector<double>& grid_times,
                                          double dt, long long n_traj, double t_max,
                                          std::uint64_t seed, ReferenceMode mode,
                                          const ErrorTableOptions& options) {
  const ReferenceMode m = resolve_mode(entry, observable, mode);
  ReferenceSeries out;
  out.times = grid_times;
  out.kind = to_string(m);

  if (m == ReferenceMode::Oracle) {
    auto it = entry.oracles.find(observable);
    if (it == entry.oracles.end()) {
      throw NotAvailableError("no oracle for observable '" + observable +
                              "' on manifold '" + entry.name + "'");
    }
    out.mean.reserve(grid_times.size());
    for (double t : grid_times) out.mean.push_back(it->second(t));
    out.sigma.assign(grid_times.size(), 0.0);
    return out;
  }

  const double dt_ref = dt / 5.0;
  const long long n_ref = std::max<long long>(
      1, static_cast<long long>(std::llround(n_traj * options.reference_traj_factor)));
  StepConfig cfg;
  cfg.dt = dt_ref;
  cfg.midpoint_iters = options.midpoint_iters;
  cfg.normal_iters = options.normal_iters;

  EnsembleOptions eopt = options.ensemble;
  eopt.output_steps = scaled_steps(grid_times, dt_ref);

  EnsembleResult res;
  if (m == ReferenceMode::Intrinsic) {
    if (!entry.intrinsic.has_value()) {
      throw NotAvailableError("manifold '" + entry.name +
                              "' has no intrinsic model for an intrinsic reference");
    }
    const IntrinsicModel& im = *entry.intrinsic;
    EnsembleOptions iopt = im.ensemble_options();
    iopt.workers = eopt.workers;
    iopt.output_steps = eopt.output_steps;
    cfg.algorithm = Algorithm::MidpointUnconstrained;
    res = integrate_ensemble(im.as_problem(), cfg, n_ref, t_max, entry.observables,
                             derive_stream_seed(seed, 101), iopt);
  } else {
    cfg.algorithm = Algorithm::CombinedMidpoint;
    res = integrate_ensemble(entry.problem, cfg, n_ref, t_max, entry.observables,
                             derive_stream_seed(seed, 102), eopt);
  }
  const int oi = observable_index(res, observable);
  out.mean.assign(res.means.row(oi).begin(), res.means.row(oi).end());
  out.sigma.assign(res.sigmas.row(oi).begin(), res.sigmas.row(oi).end());
  return out;
}

ReferenceSeries compute_reference(const CatalogEntry& entry,
                                  const std::string& observable, double dt,
                                  long long n_traj, double t_max,
                                  std::uint64_t seed, ReferenceMode mode,
                                  const ErrorTableOptions& options) {
  // grid of the would-be test run
  const long long steps = static_cast<long long>(std::llround(t_max / dt));
  const long long stride =
      std::max<long long>(1, steps / std::max(1, options.ensemble.output_points));
  std::vector<double> times;
  for (long long s = 0; s < steps; s += stride) times.push_back(s * dt);
  times.push_back(steps * dt);
  return compute_reference_on_grid(entry, observable, times, dt, n_traj, t_max, seed,
                                   mode, options);
}

ErrorTableResult build_error_table(const CatalogEntry& entry,
                                   const std::vector<Algorithm>& algorithms,
                                   const std::vector<double>& dt_list,
                                   long long n_traj, double t_max,
                                   std::uint64_t seed, ReferenceMode mode,
                                   const ErrorTableOptions& options) {
  ErrorTableResult out;
  out.dt_list = dt_list;
  out.table.manifold = entry.name;
  out.table.params = entry.params;
  out.table.n_traj = n_traj;
  out.table.t_max = t_max;
  out.table.seed = seed;

  for (size_t di = 0; di < dt_list.size(); ++di) {
    const double dt = dt_list[di];
    StepConfig cfg;
    cfg.dt = dt;
    cfg.midpoint_iters = options.midpoint_iters;
    cfg.normal_iters = options.normal_iters;

    std::vector<double> grid_times;
    std::map<std::string, EnsembleResult> runs_at_dt;
    for (Algorithm alg : algorithms) {
      cfg.algorithm = alg;
      const std::uint64_t stream =
          options.shared_streams
              ? seed
              : derive_stream_seed(seed, static_cast<std::uint32_t>(alg));
      EnsembleResult r = integrate_ensemble(entry.problem, cfg, n_traj, t_max,
                                            entry.observables, stream, options.ensemble);
      grid_times = r.times;
      runs_at_dt.emplace(to_string(alg), std::move(r));
    }

    for (const auto& obs : entry.observables) {
      ReferenceSeries ref = compute_reference_on_grid(
          entry, obs.name, grid_times, dt, n_traj, t_max, seed, mode, options);
      out.references[obs.name].push_back(std::move(ref));
    }

    for (Algorithm alg : algorithms) {
      const EnsembleResult& r = runs_at_dt.at(to_string(alg));
      for (const auto& obs : entry.observables) {
        const ReferenceSeries& ref = out.references.at(obs.name)[di];
        const int oi = observable_index(r, obs.name);
        std::vector<double> series(r.means.row(oi).begin(), r.means.row(oi).end());
        const TruncationError te = truncation_error(series, ref.mean);
        ErrorTable::Row row;
        row.observable = obs.name;
        row.dt = dt;
        row.algorithm = to_string(alg);
        row.max_truncation = te.max_abs;
        row.max_constraint = r.constraint_mean.size() > 0
                                 ? r.constraint_mean.maxCoeff()
                                 : 0.0;
        out.table.rows.push_back(std::move(row));
      }
    }
    for (auto& [name, r] : runs_at_dt) {
      out.runs[name].push_back(std::move(r));
    }
  }
  return out;
}

}  // namespace strata
