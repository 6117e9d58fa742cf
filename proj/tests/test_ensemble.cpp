#include <doctest.h>

#include <cmath>

#include "strata/ensemble.hpp"
#include "strata/manifolds.hpp"

using namespace strata;

namespace {

bool bitwise_equal(const EnsembleResult& a, const EnsembleResult& b) {
  if (a.times != b.times) return false;
  if ((a.means.array() != b.means.array()).any()) return false;
  if ((a.sigmas.array() != b.sigmas.array()).any()) return false;
  if ((a.constraint_mean.array() != b.constraint_mean.array()).any()) return false;
  return a.rejections == b.rejections;
}

}  // namespace

TEST_CASE("single trajectory is reproducible bit for bit") {
  const auto e = catalog("circle");
  StepConfig cfg;
  cfg.dt = 0.05;
  cfg.algorithm = Algorithm::CombinedMidpoint;
  EnsembleOptions opt;
  opt.workers = 1;
  const auto a = integrate_ensemble(e.problem, cfg, 1, 1.0, e.observables, 7, opt);
  const auto b = integrate_ensemble(e.problem, cfg, 1, 1.0, e.observables, 7, opt);
  CHECK(bitwise_equal(a, b));
}

TEST_CASE("results are identical across worker counts") {
  const auto e = catalog("spheroid", {{"c", 0.25}});
  StepConfig cfg;
  cfg.dt = 0.02;
  cfg.algorithm = Algorithm::CombinedMidpoint;
  EnsembleOptions opt;
  opt.workers = 1;
  const auto one = integrate_ensemble(e.problem, cfg, 2000, 0.2, e.observables, 3, opt);
  opt.workers = 4;
  const auto four = integrate_ensemble(e.problem, cfg, 2000, 0.2, e.observables, 3, opt);
  opt.workers = 16;
  const auto sixteen =
      integrate_ensemble(e.problem, cfg, 2000, 0.2, e.observables, 3, opt);
  CHECK(bitwise_equal(one, four));
  CHECK(bitwise_equal(one, sixteen));
}

TEST_CASE("grid, means and sigmas have consistent shapes") {
  const auto e = catalog("circle");
  StepConfig cfg;
  cfg.dt = 0.05;
  cfg.algorithm = Algorithm::CombinedEulerProjection;
  EnsembleOptions opt;
  opt.workers = 2;
  const auto r = integrate_ensemble(e.problem, cfg, 5000, 1.0, e.observables, 11, opt);
  CHECK(r.times.front() == doctest::Approx(0.0));
  CHECK(r.times.back() == doctest::Approx(1.0));
  CHECK(r.means.rows() == 2);
  CHECK(static_cast<size_t>(r.means.cols()) == r.times.size());
  CHECK((r.sigmas.array() >= 0.0).all());
  // t = 0 is deterministic
  CHECK(r.means(0, 0) == doctest::Approx(1.0));
  CHECK(r.sigmas(0, 0) == doctest::Approx(0.0));
  // sampling error at t = 1 has the 1/sqrt(N) scale
  CHECK(r.sigmas(0, r.times.size() - 1) > 1e-4);
  CHECK(r.sigmas(0, r.times.size() - 1) < 0.1);
}

TEST_CASE("fractional step counts are rejected") {
  const auto e = catalog("circle");
  StepConfig cfg;
  cfg.dt = 0.07;
  cfg.algorithm = Algorithm::CombinedMidpoint;
  CHECK_THROWS_AS(integrate_ensemble(e.problem, cfg, 10, 1.0, e.observables, 1, {}),
                  InvalidStateError);
}

TEST_CASE("divergence aborts with the trajectory and step recorded") {
  // Newton 2-cycle constraint: every trajectory diverges at step 0.
  SdeProblem p;
  p.dim = 2;
  p.noise_dim = 2;
  p.identity_noise = true;
  ManifoldSpec m;
  m.ambient_dim = 2;
  m.num_constraints = 1;
  m.constraint_eval = [](const Vec& x, Vec& f) {
    f[0] = x[0] * x[0] * x[0] - 2.0 * x[0] + 2.0;
  };
  m.gradient_eval = [](const Vec& x, Mat& g) {
    g(0, 0) = 3.0 * x[0] * x[0] - 2.0;
    g(0, 1) = 1.0;
  };
  p.manifold = m;
  p.drift = [](const Vec&, double, Vec& a) { a.setZero(); };
  p.initial_state = Vec{{0.0, 0.0}};

  StepConfig cfg;
  cfg.dt = 0.1;
  cfg.algorithm = Algorithm::CombinedEulerProjection;
  cfg.normal_iters = 6;
  EnsembleOptions opt;
  opt.workers = 2;
  long long traj = -1, step = -1;
  try {
    integrate_ensemble(p, cfg, 100, 0.5, {}, 5, opt);
  } catch (const TrajectoryFailure& e) {
    traj = e.trajectory();
    step = e.step();
  }
  CHECK(traj == 0);  // smallest failing trajectory wins
  CHECK(step >= 0);
  // the report is deterministic across worker counts
  opt.workers = 5;
  try {
    integrate_ensemble(p, cfg, 100, 0.5, {}, 5, opt);
    FAIL("expected TrajectoryFailure");
  } catch (const TrajectoryFailure& e) {
    CHECK(e.trajectory() == traj);
    CHECK(e.step() == step);
  }
}

TEST_CASE("guard bands resample and count rejections") {
  // Intrinsic spheroid started close to an injected polar guard with a
  // large step: trajectories crossing theta < 0.05 restart on fresh streams.
  const auto e = catalog("spheroid", {{"c", 0.25}});
  IntrinsicModel im = intrinsic_model(e);
  im.initial = Vec{{0.12, 0.0}};
  StepConfig cfg;
  cfg.dt = 0.01;
  cfg.algorithm = Algorithm::MidpointUnconstrained;
  EnsembleOptions opt = im.ensemble_options();
  opt.guards.push_back({0, 0.05, 3.14159265358979323846 - 0.05});
  opt.workers = 2;
  const auto r =
      integrate_ensemble(im.as_problem(), cfg, 500, 0.05, e.observables, 21, opt);
  CHECK(r.rejections > 0);
  for (Eigen::Index i = 0; i < r.means.cols(); ++i) {
    CHECK(std::isfinite(r.means(0, i)));
  }
  // determinism still holds with rejections in play
  EnsembleOptions opt1 = opt;
  opt1.workers = 7;
  const auto r2 =
      integrate_ensemble(im.as_problem(), cfg, 500, 0.05, e.observables, 21, opt1);
  CHECK(bitwise_equal(r, r2));
}

TEST_CASE("explicit output steps override the stride") {
  const auto e = catalog("circle");
  StepConfig cfg;
  cfg.dt = 0.05;
  cfg.algorithm = Algorithm::CombinedMidpoint;
  EnsembleOptions opt;
  opt.workers = 1;
  opt.output_steps = {0, 10, 20};
  const auto r = integrate_ensemble(e.problem, cfg, 50, 1.0, e.observables, 2, opt);
  REQUIRE(r.times.size() == 3);
  CHECK(r.times[1] == doctest::Approx(0.5));
  opt.output_steps = {0, 10};  // must end at the final step
  CHECK_THROWS_AS(integrate_ensemble(e.problem, cfg, 50, 1.0, e.observables, 2, opt),
                  InvalidStateError);
}
