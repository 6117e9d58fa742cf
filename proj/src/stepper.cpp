#include "strata/stepper.hpp"

#include <sstream>

namespace strata {

std::string to_string(Algorithm a) {
  switch (a) {
    case Algorithm::CombinedEulerProjection: return "cEP";
    case Algorithm::TangentialMidpoint: return "tMP";
    case Algorithm::CombinedMidpoint: return "cMP";
    case Algorithm::MidpointUnconstrained: return "midpoint_unconstrained";
  }
  return "?";
}

Algorithm algorithm_from_string(const std::string& name) {
  if (name == "cEP") return Algorithm::CombinedEulerProjection;
  if (name == "tMP") return Algorithm::TangentialMidpoint;
  if (name == "cMP") return Algorithm::CombinedMidpoint;
  if (name == "midpoint_unconstrained") return Algorithm::MidpointUnconstrained;
  throw ConfigError("algorithms", "unknown algorithm '" + name +
                                      "' (expected cEP, tMP, cMP or midpoint_unconstrained)");
}

namespace detail {

namespace {

// delta = a(x, tbar) dt + B(x, tbar) dw, written into ws.delta.
inline void coefficient_step(const SdeProblem& p, const Vec& x, double tbar,
                             double dt, const Vec& dw, StepperWorkspace& ws) {
  p.drift(x, tbar, ws.drift_val);
  if (p.identity_noise) {
    ws.delta = ws.drift_val * dt + p.noise_scale * dw;
  } else {
    p.noise(x, tbar, ws.noise_val);
    ws.delta = ws.drift_val * dt;
    ws.delta.noalias() += ws.noise_val * dw;
  }
}

// Midpoint fixed point shared by tMP/cMP/unconstrained. Runs the loop
//   xbar(0) = x0;  delta = [a(xbar) dt + B(xbar) dw] / 2;
//   (project tangentially at xbar);  xbar <- x0 + delta
// for m = 0..iters inclusive, then writes x0 + 2 delta into out.
inline void midpoint_core(const SdeProblem& p, const Vec& x0, double t0,
                          const StepConfig& cfg, const Vec& dw, bool project,
                          StepperWorkspace& ws, Vec& out) {
  const double tbar = t0 + 0.5 * cfg.dt;
  ws.xbar = x0;
  for (int m = 0; m <= cfg.midpoint_iters; ++m) {
    coefficient_step(p, ws.xbar, tbar, cfg.dt, dw, ws);
    ws.delta *= 0.5;
    if (project) {
      frame_at(*p.manifold, ws.xbar, ws.geo);
      tangential_project_inplace(ws.delta, ws.geo);
    }
    ws.xbar = x0 + ws.delta;
  }
  out = x0 + 2.0 * ws.delta;
}

}  // namespace

void step_cep(const SdeProblem& p, const Vec& x0, double t0, const StepConfig& cfg,
              const Vec& dw, StepperWorkspace& ws, Vec& out) {
  coefficient_step(p, x0, t0 + 0.5 * cfg.dt, cfg.dt, dw, ws);
  frame_at(*p.manifold, x0, ws.geo);
  tangential_project_inplace(ws.delta, ws.geo);
  out = x0 + ws.delta;
  normal_project_inplace(out, *p.manifold, cfg.normal_iters, ws.geo);
}

void step_tmp(const SdeProblem& p, const Vec& x0, double t0, const StepConfig& cfg,
              const Vec& dw, StepperWorkspace& ws, Vec& out) {
  midpoint_core(p, x0, t0, cfg, dw, /*project=*/true, ws, out);
}

void step_cmp(const SdeProblem& p, const Vec& x0, double t0, const StepConfig& cfg,
              const Vec& dw, StepperWorkspace& ws, Vec& out) {
  midpoint_core(p, x0, t0, cfg, dw, /*project=*/true, ws, out);
  normal_project_inplace(out, *p.manifold, cfg.normal_iters, ws.geo);
}

void step_midpoint_unconstrained(const SdeProblem& p, const Vec& x0, double t0,
                                 const StepConfig& cfg, const Vec& dw,
                                 StepperWorkspace& ws, Vec& out) {
  midpoint_core(p, x0, t0, cfg, dw, /*project=*/false, ws, out);
}

void step_dispatch(const SdeProblem& p, const Vec& x0, double t0,
                   const StepConfig& cfg, const Vec& dw, StepperWorkspace& ws,
                   Vec& out) {
  switch (cfg.algorithm) {
    case Algorithm::CombinedEulerProjection: step_cep(p, x0, t0, cfg, dw, ws, out); return;
    case Algorithm::TangentialMidpoint: step_tmp(p, x0, t0, cfg, dw, ws, out); return;
    case Algorithm::CombinedMidpoint: step_cmp(p, x0, t0, cfg, dw, ws, out); return;
    case Algorithm::MidpointUnconstrained:
      step_midpoint_unconstrained(p, x0, t0, cfg, dw, ws, out);
      return;
  }
}

}  // namespace detail

namespace {

void check_step_inputs(const SdeProblem& p, const Vec& x0, const StepConfig& cfg,
                       const Vec& dw, bool needs_manifold) {
  if (cfg.dt <= 0.0) throw InvalidStateError("step: dt must be positive");
  if (cfg.midpoint_iters < 1 || cfg.normal_iters < 1) {
    throw InvalidStateError("step: iteration counts must be >= 1");
  }
  if (x0.size() != p.dim) throw InvalidStateError("step: state dimension mismatch");
  if (dw.size() != p.noise_dim) throw InvalidStateError("step: noise dimension mismatch");
  if (needs_manifold && !p.manifold.has_value()) {
    throw InvalidStateError("step: projected algorithm requires a manifold");
  }
}

Vec run_step(const SdeProblem& p, const Vec& x0, double t0, const StepConfig& cfg,
             const Vec& dw, bool needs_manifold,
             void (*fn)(const SdeProblem&, const Vec&, double, const StepConfig&,
                        const Vec&, detail::StepperWorkspace&, Vec&)) {
  check_step_inputs(p, x0, cfg, dw, needs_manifold);
  detail::StepperWorkspace ws;
  const int pdim = p.manifold ? p.manifold->num_constraints : 0;
  ws.resize(p.dim, p.noise_dim, pdim);
  Vec out(p.dim);
  fn(p, x0, t0, cfg, dw, ws, out);
  return out;
}

}  // namespace

Vec step_cep(const SdeProblem& p, const Vec& x0, double t0, const StepConfig& cfg,
             const Vec& dw) {
  return run_step(p, x0, t0, cfg, dw, true, &detail::step_cep);
}

Vec step_tmp(const SdeProblem& p, const Vec& x0, double t0, const StepConfig& cfg,
             const Vec& dw) {
  return run_step(p, x0, t0, cfg, dw, true, &detail::step_tmp);
}

Vec step_cmp(const SdeProblem& p, const Vec& x0, double t0, const StepConfig& cfg,
             const Vec& dw) {
  return run_step(p, x0, t0, cfg, dw, true, &detail::step_cmp);
}

Vec step_midpoint_unconstrained(const SdeProblem& p, const Vec& x0, double t0,
                                const StepConfig& cfg, const Vec& dw) {
  return run_step(p, x0, t0, cfg, dw, false, &detail::step_midpoint_unconstrained);
}

}  // namespace strata
