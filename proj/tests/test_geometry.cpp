#include <doctest.h>

#include <cmath>
#include <random>

#include "strata/geometry.hpp"
#include "strata/manifolds.hpp"

using namespace strata;

namespace {

ManifoldSpec unit_circle() {
  return make_quadratic(-1.0, Vec::Zero(2), Mat::Identity(2, 2));
}

// Independent 1-D oracle for the circle's normal projection: scalar Newton
// iteration on the radius, r <- r - (r^2 - 1) / (2r).
double radius_newton(double r0, int iters) {
  double r = r0;
  for (int i = 0; i < iters; ++i) r = r - (r * r - 1.0) / (2.0 * r);
  return r;
}

// Central finite differences of the constraints, step 1e-5.
Mat fd_gradients(const ManifoldSpec& m, const Vec& x) {
  const double h = 1e-5;
  Mat out(m.num_constraints, m.ambient_dim);
  Vec fp(m.num_constraints), fm(m.num_constraints);
  for (int i = 0; i < m.ambient_dim; ++i) {
    Vec xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    m.constraint_eval(xp, fp);
    m.constraint_eval(xm, fm);
    out.col(i) = (fp - fm) / (2.0 * h);
  }
  return out;
}

struct CatalogPoint {
  CatalogEntry entry;
  Vec point;
};

// Entries paired with a generic on-manifold point for property checks.
std::vector<CatalogPoint> catalog_points() {
  std::vector<CatalogPoint> out;
  out.push_back({catalog("circle"), Vec{{std::cos(0.7), std::sin(0.7)}}});
  out.push_back({catalog("hypersphere", {{"n", 10}}), Vec::Unit(10, 0)});
  {
    auto e = catalog("spheroid", {{"c", 0.25}});
    out.push_back({e, e.problem.initial_state});
  }
  {
    auto e = catalog("hyperboloid", {{"c", 0.25}});
    out.push_back({e, Vec{{std::cosh(0.3) * std::cos(0.4),
                           std::cosh(0.3) * std::sin(0.4), 0.25 * std::sinh(0.3)}}});
  }
  out.push_back({catalog("catenoid"),
                 Vec{{std::cosh(1.0) * std::cos(0.5), std::cosh(1.0) * std::sin(0.5), 1.0}}});
  out.push_back({catalog("polynomial", {{"N", 4}, {"n", 3}}), Vec{{1.0, 0.0, 0.0}}});
  out.push_back({catalog("sphere-plane"), Vec{{std::cos(0.3), std::sin(0.3), 0.0}}});
  return out;
}

}  // namespace

TEST_CASE("constraint evaluation on simple manifolds") {
  const ManifoldSpec circle = unit_circle();
  CHECK(eval_constraints(circle, Vec{{1.0, 0.0}})[0] == doctest::Approx(0.0));
  CHECK(eval_constraints(circle, Vec{{2.0, 0.0}})[0] == doctest::Approx(3.0));

  const auto quartic = catalog("polynomial", {{"N", 4}, {"n", 3}});
  CHECK(eval_constraints(quartic.manifold, Vec{{1.0, 0.0, 0.0}})[0] ==
        doctest::Approx(0.0));

  Vec bad{{1.0, std::nan("")}};
  CHECK_THROWS_AS(eval_constraints(circle, bad), InvalidStateError);
  CHECK_THROWS_AS(eval_constraints(circle, Vec::Zero(3)), InvalidStateError);
}

TEST_CASE("constraint gradients") {
  const ManifoldSpec circle = unit_circle();
  Mat g = constraint_gradients(circle, Vec{{1.0, 0.0}});
  CHECK(g(0, 0) == doctest::Approx(2.0));
  CHECK(g(0, 1) == doctest::Approx(0.0));

  const auto spheroid = catalog("spheroid", {{"c", 0.25}});
  g = constraint_gradients(spheroid.manifold, Vec{{0.0, 0.0, 0.25}});
  CHECK(g(0, 0) == doctest::Approx(0.0));
  CHECK(g(0, 2) == doctest::Approx(8.0));

  const auto sp = catalog("sphere-plane");
  g = constraint_gradients(sp.manifold, Vec{{1.0, 0.0, 0.0}});
  CHECK(g.rows() == 2);
  CHECK(g(0, 0) == doctest::Approx(2.0));
  CHECK(g(1, 2) == doctest::Approx(1.0));
}

TEST_CASE("orthonormalize") {
  SUBCASE("single row is scaled") {
    Mat v(1, 3);
    v << 2.0, 0.0, 0.0;
    const NormalFrame f = orthonormalize(v);
    CHECK(f.normals(0, 0) == doctest::Approx(1.0));
    CHECK(f.projection_matrix(0, 0) == doctest::Approx(2.0));
  }
  SUBCASE("textbook two-row case") {
    Mat v(2, 3);
    v << 1.0, 0.0, 0.0, 1.0, 1.0, 0.0;
    const NormalFrame f = orthonormalize(v);
    CHECK(f.normals.row(0).isApprox(Eigen::RowVector3d(1, 0, 0), 1e-14));
    CHECK(f.normals.row(1).isApprox(Eigen::RowVector3d(0, 1, 0), 1e-14));
    // orthonormality to 1e-12
    CHECK(std::abs(f.normals.row(0).dot(f.normals.row(1))) < 1e-12);
  }
  SUBCASE("dependent rows are rejected") {
    Mat v(2, 2);
    v << 1.0, 0.0, 2.0, 0.0;
    CHECK_THROWS_AS(orthonormalize(v), RankDeficiencyError);
    try {
      orthonormalize(v);
    } catch (const RankDeficiencyError& e) {
      CHECK(e.row() == 1);
    }
  }
}

TEST_CASE("tangential projection examples") {
  const ManifoldSpec circle = unit_circle();
  Vec out = tangential_project(Vec{{3.0, 4.0}}, Vec{{1.0, 0.0}}, circle);
  CHECK(out[0] == doctest::Approx(0.0));
  CHECK(out[1] == doctest::Approx(4.0));

  const auto sphere = catalog("hypersphere", {{"n", 3}});
  out = tangential_project(Vec{{1.0, 2.0, 5.0}}, Vec{{0.0, 0.0, 1.0}}, sphere.manifold);
  CHECK(out.isApprox(Vec{{1.0, 2.0, 0.0}}, 1e-14));

  const auto sp = catalog("sphere-plane");
  out = tangential_project(Vec{{1.0, 1.0, 1.0}}, Vec{{1.0, 0.0, 0.0}}, sp.manifold);
  CHECK(out.isApprox(Vec{{0.0, 1.0, 0.0}}, 1e-14));
}

TEST_CASE("normal projection on the circle") {
  const ManifoldSpec circle = unit_circle();
  const Vec x{{1.1, 0.0}};

  const Vec y1 = normal_project(x, circle, 1);
  CHECK(y1[0] == doctest::Approx(radius_newton(1.1, 1)).epsilon(1e-14));
  CHECK(y1[0] == doctest::Approx(1.0045454545454546).epsilon(1e-14));

  const Vec y3 = normal_project(x, circle, 3);
  CHECK(y3[0] == doctest::Approx(radius_newton(1.1, 3)).epsilon(1e-14));
  CHECK(std::abs(y3.squaredNorm() - 1.0) < 2e-10);  // |f| ~ 1.1e-10

  // exact projection takes precedence when supplied
  ManifoldSpec with_exact = circle;
  with_exact.exact_normal_projection = [](const Vec& p, Vec& y) { y = p / p.norm(); };
  const Vec y = normal_project(Vec{{3.0, 4.0}}, with_exact, 3);
  CHECK(y[0] == doctest::Approx(0.6));
  CHECK(y[1] == doctest::Approx(0.8));
}

TEST_CASE("normal projection divergence is detected") {
  // f(x, y) = x^3 - 2x + 2 has the classic Newton 2-cycle from x = 0.
  ManifoldSpec m;
  m.ambient_dim = 2;
  m.num_constraints = 1;
  m.constraint_eval = [](const Vec& x, Vec& f) {
    f[0] = x[0] * x[0] * x[0] - 2.0 * x[0] + 2.0;
  };
  m.gradient_eval = [](const Vec& x, Mat& g) {
    g(0, 0) = 3.0 * x[0] * x[0] - 2.0;
    g(0, 1) = 0.0;
  };
  CHECK_THROWS_AS(normal_project(Vec{{0.0, 0.0}}, m, 4), DivergenceError);
}

TEST_CASE("projection idempotence and orthogonality across the catalog") {
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (const auto& [entry, x] : catalog_points()) {
    CAPTURE(entry.name);
    const Mat grads = constraint_gradients(entry.manifold, x);
    for (int rep = 0; rep < 25; ++rep) {
      Vec delta(entry.manifold.ambient_dim);
      for (int i = 0; i < delta.size(); ++i) delta[i] = gauss(rng);
      const Vec once = tangential_project(delta, x, entry.manifold);
      const Vec twice = tangential_project(once, x, entry.manifold);
      CHECK((twice - once).norm() <= 1e-12 * std::max(1.0, delta.norm()));
      for (int j = 0; j < grads.rows(); ++j) {
        CHECK(std::abs(once.dot(grads.row(j))) <=
              1e-10 * delta.norm() * grads.row(j).norm());
      }
    }
  }
}

TEST_CASE("analytic gradients match central finite differences") {
  for (const auto& [entry, x] : catalog_points()) {
    CAPTURE(entry.name);
    const Mat analytic = constraint_gradients(entry.manifold, x);
    const Mat fd = fd_gradients(entry.manifold, x);
    for (int j = 0; j < analytic.rows(); ++j) {
      const double scale = std::max(1.0, analytic.row(j).norm());
      CHECK((analytic.row(j) - fd.row(j)).norm() / scale < 1e-6);
    }
  }
}

TEST_CASE("normal projection contracts the residual") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (const auto& [entry, x] : catalog_points()) {
    CAPTURE(entry.name);
    if (entry.manifold.has_exact_projection()) continue;
    for (int rep = 0; rep < 10; ++rep) {
      // perturb off the manifold, keeping max|f| <= 0.1
      Vec y = x;
      Vec dir(x.size());
      for (int i = 0; i < dir.size(); ++i) dir[i] = gauss(rng);
      dir.normalize();
      double eps = 0.02;
      Vec f0(entry.manifold.num_constraints);
      for (;;) {
        entry.manifold.constraint_eval(y + eps * dir, f0);
        if (f0.cwiseAbs().maxCoeff() <= 0.1) break;
        eps *= 0.5;
      }
      y += eps * dir;
      double prev = f0.cwiseAbs().maxCoeff();
      if (prev < 1e-12) continue;
      Vec cur = y;
      for (int it = 0; it < 3 && prev > 1e-12; ++it) {
        cur = normal_project(cur, entry.manifold, 1);
        Vec f1(entry.manifold.num_constraints);
        entry.manifold.constraint_eval(cur, f1);
        const double now = f1.cwiseAbs().maxCoeff();
        CHECK(now <= prev / 5.0);
        prev = now;
      }
    }
  }
}

TEST_CASE("iterative projection agrees with the exact one") {
  const auto sphere = catalog("hypersphere", {{"n", 10}});
  ManifoldSpec iterative = sphere.manifold;
  iterative.exact_normal_projection = nullptr;

  std::mt19937_64 rng(11);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int rep = 0; rep < 50; ++rep) {
    Vec x(10);
    for (int i = 0; i < 10; ++i) x[i] = gauss(rng);
    x.normalize();
    // radial perturbation keeping |f| = |r^2 - 1| <= 0.05
    x *= std::sqrt(1.0 + 0.049 * (rep % 2 == 0 ? 1.0 : -1.0));
    const Vec ye = normal_project(x, sphere.manifold, 3);
    const Vec yi = normal_project(x, iterative, 3);
    CHECK((ye - yi).norm() < 1e-8);
  }
}
