#pragma once

#include <complex>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "strata/ensemble.hpp"
#include "strata/geometry.hpp"
#include "strata/stepper.hpp"

namespace strata {

/// Single quadratic constraint f(y) = f0 + h.y + y^T G y. G is symmetrized
/// at construction; the gradient h + 2Gy is analytic.
struct QuadraticConstraint {
  double f0 = 0.0;
  Vec h;
  Mat g;

  QuadraticConstraint(double f0_in, Vec h_in, Mat g_in);
  double value(const Vec& y) const;
  Vec gradient(const Vec& y) const;
};

/// Intrinsic-coordinate Stratonovich model: diagonal noise, an embedding
/// into the ambient space, and the coordinate bands outside which the
/// equations are singular.
struct IntrinsicModel {
  int dim = 0;
  std::function<void(const Vec&, double, Vec&)> drift;       // alpha(phi, t)
  std::function<void(const Vec&, double, Vec&)> noise_diag;  // beta(phi, t) diagonal
  std::function<void(const Vec&, Vec&)> embed;               // phi -> x in R^n
  Vec initial;
  std::vector<GuardBand> guards;

  /// Wrap as an SdeProblem for the unconstrained midpoint stepper.
  SdeProblem as_problem() const;
  /// Ensemble options carrying the embedding map and guard bands.
  EnsembleOptions ensemble_options() const;
};

/// A catalog manifold: constraint spec, default projected SDE, observables,
/// closed-form oracles where they exist, and the intrinsic model if one is
/// implemented.
struct CatalogEntry {
  std::string name;
  std::map<std::string, double> params;
  ManifoldSpec manifold;
  SdeProblem problem;
  std::vector<Observable> observables;
  std::map<std::string, std::function<double(double)>> oracles;  // name -> t -> value
  std::optional<IntrinsicModel> intrinsic;
};

/// Build a single-constraint ManifoldSpec from quadratic data.
ManifoldSpec make_quadratic(double f0, const Vec& h, const Mat& g);

/// Construct a catalog entry by name. Recognized names:
///   circle            (omega0, b)       Kubo oscillator on the unit circle
///   hypersphere       (n)               |x|^2 = 1 with exact projection
///   spheroid          (c)               x^2 + y^2 + z^2/c^2 = 1
///   hyperboloid       (c)               x^2 + y^2 - z^2/c^2 = 1
///   catenoid                            x^2 + y^2 - sinh^2 z = 1
///   polynomial        (N, n)            sum_j x_j^N = 1, axial drift (0,0,2z)
///   sphere-plane      (omega0, b)       {|x|^2 - 1 = 0, z = 0}
/// Unknown names or invalid parameters throw ConfigError.
CatalogEntry catalog(const std::string& name,
                     const std::map<std::string, double>& params = {});

/// Hard-coded intrinsic Stratonovich models (circle, sphere n=3, spheroid,
/// hyperboloid, catenoid). Throws NotAvailableError otherwise.
IntrinsicModel intrinsic_model(const CatalogEntry& entry);

/// Exact Kubo moment <[z(t)]^m> for z(0) = 1 and omega(t) = omega0 t:
///   exp(i m omega0 t^2 / 2 - m^2 b^2 t / 2).
std::complex<double> kubo_moment(int m, double t, double omega0, double b);

/// Mean squared diffusion distance oracles.
double catenoid_msd(double t);
double hypersphere_msd(int n, double t);

}  // namespace strata
