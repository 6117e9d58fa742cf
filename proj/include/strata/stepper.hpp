#pragma once

#include <functional>
#include <optional>
#include <string>

#include "strata/geometry.hpp"
#include "strata/rng.hpp"
#include "strata/types.hpp"

namespace strata {

/// The projected single-step algorithms, plus the unconstrained midpoint
/// used for intrinsic-coordinate reference runs.
enum class Algorithm {
  CombinedEulerProjection,   // cEP: explicit step, tangential + normal projection
  TangentialMidpoint,        // tMP: midpoint fixed point, tangential only
  CombinedMidpoint,          // cMP: tMP followed by a normal projection
  MidpointUnconstrained,     // plain implicit midpoint, no manifold
};

std::string to_string(Algorithm a);
Algorithm algorithm_from_string(const std::string& name);

/// Stratonovich problem dx = a(x,t) dt + B(x,t) dw on R^n, optionally tied
/// to a constraint manifold. `identity_noise` short-circuits B = noise_scale*I
/// so the common isotropic-diffusion case skips the matrix product.
struct SdeProblem {
  int dim = 0;
  int noise_dim = 0;
  std::function<void(const Vec&, double, Vec&)> drift;   // a(x,t)
  std::function<void(const Vec&, double, Mat&)> noise;   // B(x,t), dim x noise_dim
  bool identity_noise = false;
  double noise_scale = 1.0;
  std::optional<ManifoldSpec> manifold;
  Vec initial_state;
};

/// Per-step controls. `midpoint_iters` counts the refinement passes of the
/// fixed-point loop after the x0 initialization, matching the algorithm
/// loop "set m=0; ...; if m<iters, m->m+1, repeat" (so iters=3 evaluates the
/// coefficients four times). `normal_iters` is the number of normal-projection
/// updates.
struct StepConfig {
  double dt = 0.0;
  int midpoint_iters = 3;
  int normal_iters = 3;
  Algorithm algorithm = Algorithm::CombinedMidpoint;
};

namespace detail {

/// Preallocated state for the single-step kernels.
struct StepperWorkspace {
  GeometryWorkspace geo;
  Vec delta;
  Vec xbar;
  Vec drift_val;
  Mat noise_val;
  Vec x1;
  void resize(int n, int s, int p) {
    geo.resize(n, p > 0 ? p : 1);
    delta.resize(n);
    xbar.resize(n);
    drift_val.resize(n);
    noise_val.resize(n, s);
    x1.resize(n);
  }
};

/// In-place kernels; `out` may not alias x0. Coefficients are evaluated at
/// the interval midpoint time t0 + dt/2.
void step_cep(const SdeProblem& p, const Vec& x0, double t0, const StepConfig& cfg,
              const Vec& dw, StepperWorkspace& ws, Vec& out);
void step_tmp(const SdeProblem& p, const Vec& x0, double t0, const StepConfig& cfg,
              const Vec& dw, StepperWorkspace& ws, Vec& out);
void step_cmp(const SdeProblem& p, const Vec& x0, double t0, const StepConfig& cfg,
              const Vec& dw, StepperWorkspace& ws, Vec& out);
void step_midpoint_unconstrained(const SdeProblem& p, const Vec& x0, double t0,
                                 const StepConfig& cfg, const Vec& dw,
                                 StepperWorkspace& ws, Vec& out);

void step_dispatch(const SdeProblem& p, const Vec& x0, double t0,
                   const StepConfig& cfg, const Vec& dw, StepperWorkspace& ws,
                   Vec& out);

}  // namespace detail

/// Allocating single-step entry points.
Vec step_cep(const SdeProblem& p, const Vec& x0, double t0, const StepConfig& cfg,
             const Vec& dw);
Vec step_tmp(const SdeProblem& p, const Vec& x0, double t0, const StepConfig& cfg,
             const Vec& dw);
Vec step_cmp(const SdeProblem& p, const Vec& x0, double t0, const StepConfig& cfg,
             const Vec& dw);
Vec step_midpoint_unconstrained(const SdeProblem& p, const Vec& x0, double t0,
                                const StepConfig& cfg, const Vec& dw);

}  // namespace strata
