#include <doctest.h>

#include <cmath>
#include <random>

#include "strata/manifolds.hpp"

using namespace strata;

TEST_CASE("quadratic constraint construction") {
  SUBCASE("unit circle") {
    const ManifoldSpec m = make_quadratic(-1.0, Vec::Zero(2), Mat::Identity(2, 2));
    CHECK(eval_constraints(m, Vec{{1.0, 0.0}})[0] == doctest::Approx(0.0));
  }
  SUBCASE("spheroid") {
    Mat g = Mat::Identity(3, 3);
    g(2, 2) = 1.0 / (0.25 * 0.25);
    const ManifoldSpec m = make_quadratic(-1.0, Vec::Zero(3), g);
    CHECK(eval_constraints(m, Vec{{0.0, 0.0, 0.25}})[0] == doctest::Approx(0.0));
  }
  SUBCASE("one-sheet hyperboloid") {
    Mat g = Mat::Identity(3, 3);
    g(2, 2) = -1.0 / (0.25 * 0.25);
    const ManifoldSpec m = make_quadratic(-1.0, Vec::Zero(3), g);
    CHECK(eval_constraints(m, Vec{{1.0, 0.0, 0.0}})[0] == doctest::Approx(0.0));
  }
  SUBCASE("asymmetric G is symmetrized") {
    Mat g(2, 2);
    g << 1.0, 0.4, 0.0, 1.0;
    QuadraticConstraint q(-1.0, Vec::Zero(2), g);
    CHECK(q.g(0, 1) == doctest::Approx(0.2));
    CHECK(q.g(1, 0) == doctest::Approx(0.2));
    // gradient h + 2 G y against finite differences
    const Vec y{{0.3, -0.7}};
    const double h = 1e-6;
    for (int i = 0; i < 2; ++i) {
      Vec yp = y, ym = y;
      yp[i] += h;
      ym[i] -= h;
      const double fd = (q.value(yp) - q.value(ym)) / (2.0 * h);
      CHECK(q.gradient(y)[i] == doctest::Approx(fd).epsilon(1e-6));
    }
  }
}

TEST_CASE("catalog wiring") {
  SUBCASE("catenoid embedding point satisfies the constraint") {
    const auto e = catalog("catenoid");
    const Vec x{{std::cosh(1.0) * std::cos(0.5), std::cosh(1.0) * std::sin(0.5), 1.0}};
    CHECK(std::abs(eval_constraints(e.manifold, x)[0]) < 1e-12);
  }
  SUBCASE("polynomial gradient at the axis point") {
    const auto e = catalog("polynomial", {{"N", 4}, {"n", 3}});
    const Mat g = constraint_gradients(e.manifold, Vec{{1.0, 0.0, 0.0}});
    CHECK(g(0, 0) == doctest::Approx(4.0));
    CHECK(g(0, 1) == doctest::Approx(0.0));
  }
  SUBCASE("sphere-plane tangent space has rank one") {
    const auto e = catalog("sphere-plane");
    const Vec x{{1.0, 0.0, 0.0}};
    // two independent normals leave a single tangent direction (0, 1, 0)
    const Vec t = tangential_project(Vec{{0.3, 0.8, -0.2}}, x, e.manifold);
    CHECK(t[0] == doctest::Approx(0.0));
    CHECK(t[1] == doctest::Approx(0.8));
    CHECK(t[2] == doctest::Approx(0.0));
  }
  SUBCASE("hypersphere carries the exact projection") {
    const auto e = catalog("hypersphere", {{"n", 10}});
    CHECK(e.manifold.has_exact_projection());
    const Vec y = normal_project(3.0 * Vec::Unit(10, 4), e.manifold);
    CHECK(y[4] == doctest::Approx(1.0));
  }
  SUBCASE("unknown names and bad parameters") {
    CHECK_THROWS_AS(catalog("torus"), ConfigError);
    CHECK_THROWS_AS(catalog("polynomial", {{"N", 3}}), ConfigError);
    CHECK_THROWS_AS(catalog("spheroid", {{"c", -1.0}}), ConfigError);
    CHECK_THROWS_AS(catalog("hypersphere", {{"n", 1}}), ConfigError);
  }
}

TEST_CASE("intrinsic models") {
  SUBCASE("spheroid reduces to the sphere at c = 1") {
    const auto spheroid = catalog("spheroid", {{"c", 1.0}});
    const auto sphere = catalog("sphere");
    const IntrinsicModel a = intrinsic_model(spheroid);
    const IntrinsicModel b = intrinsic_model(sphere);
    Vec da(2), db(2), na(2), nb(2);
    for (double th : {0.3, 0.785398163397448279, 1.1, 2.0, 2.8}) {
      const Vec phi{{th, 0.4}};
      a.drift(phi, 0.0, da);
      b.drift(phi, 0.0, db);
      a.noise_diag(phi, 0.0, na);
      b.noise_diag(phi, 0.0, nb);
      CHECK(std::abs(da[0] - db[0]) < 1e-14);
      CHECK(std::abs(da[0] - 0.5 / std::tan(th)) < 1e-14);
      CHECK(std::abs(na[0] - nb[0]) < 1e-14);
      CHECK(std::abs(na[1] - nb[1]) < 1e-14);
    }
  }
  SUBCASE("spheroid noise coefficient at theta = 1") {
    const auto e = catalog("spheroid", {{"c", 0.25}});
    const IntrinsicModel im = intrinsic_model(e);
    Vec beta(2);
    im.noise_diag(Vec{{1.0, 0.0}}, 0.0, beta);
    CHECK(beta[0] == doctest::Approx(1.7246989843053864).epsilon(1e-12));
  }
  SUBCASE("hyperboloid drift vanishes at the waist") {
    const auto e = catalog("hyperboloid", {{"c", 0.25}});
    const IntrinsicModel im = intrinsic_model(e);
    Vec a(2);
    im.drift(Vec{{0.0, 0.7}}, 0.0, a);
    CHECK(a[0] == doctest::Approx(0.0));
    CHECK(a[1] == doctest::Approx(0.0));
  }
  SUBCASE("entries without a model say so") {
    CHECK_THROWS_AS(intrinsic_model(catalog("polynomial")), NotAvailableError);
    CHECK_THROWS_AS(intrinsic_model(catalog("hypersphere", {{"n", 10}})),
                    NotAvailableError);
  }
}

TEST_CASE("embedding consistency for every intrinsic model") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> theta_band(0.3, 2.8);
  std::uniform_real_distribution<double> angle(0.0, 6.28);
  std::uniform_real_distribution<double> vband(-1.5, 1.5);

  for (const char* name : {"circle", "sphere", "spheroid", "hyperboloid", "catenoid"}) {
    CAPTURE(name);
    const auto e = catalog(name);
    const IntrinsicModel im = intrinsic_model(e);
    Vec x(e.manifold.ambient_dim), f(e.manifold.num_constraints);
    for (int rep = 0; rep < 1000; ++rep) {
      Vec phi(im.dim);
      if (im.dim == 1) {
        phi[0] = angle(rng);
      } else if (std::string(name) == "sphere" || std::string(name) == "spheroid") {
        phi[0] = theta_band(rng);
        phi[1] = angle(rng);
      } else {
        phi[0] = vband(rng);
        phi[1] = angle(rng);
      }
      im.embed(phi, x);
      e.manifold.constraint_eval(x, f);
      CHECK(f.cwiseAbs().maxCoeff() <= 1e-12);
    }
  }
}

TEST_CASE("closed-form oracles") {
  SUBCASE("kubo moments") {
    CHECK(kubo_moment(1, 0.0, 2.5, 1.0).real() == doctest::Approx(1.0));
    CHECK(kubo_moment(1, 0.0, 2.5, 1.0).imag() == doctest::Approx(0.0));
    CHECK(kubo_moment(1, 1.0, 2.5, 1.0).real() ==
          doctest::Approx(0.1912526804857484).epsilon(1e-13));
    CHECK(kubo_moment(2, 1.0, 0.0, 1.0).real() ==
          doctest::Approx(std::exp(-2.0)).epsilon(1e-13));
  }
  SUBCASE("diffusion distances") {
    CHECK(catenoid_msd(2.5) == doctest::Approx(5.0));
    CHECK(hypersphere_msd(10, 1e9) == doctest::Approx(2.0));
    CHECK(hypersphere_msd(10, 0.5) ==
          doctest::Approx(1.7892015508762713).epsilon(1e-13));
  }
}
