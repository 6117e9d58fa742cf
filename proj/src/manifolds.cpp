#include "strata/manifolds.hpp"

#include <cmath>
#include <sstream>

namespace strata {

namespace {

constexpr double kPi = 3.14159265358979323846;

double get_param(const std::map<std::string, double>& params, const std::string& key,
                 double fallback) {
  auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

Observable dist_sq_observable(Vec x0) {
  return {"dist_sq", [x0 = std::move(x0)](const Vec& x) {
            return (x - x0).squaredNorm();
          }};
}

// J x = (-y, x[, 0...]) rotation generator about the z-axis of the first two
// coordinates, normalized to unit speed on circles of any radius.
void unit_rotation(const Vec& x, Vec& out) {
  out.setZero();
  const double r = std::hypot(x[0], x[1]);
  out[0] = -x[1] / r;
  out[1] = x[0] / r;
}

}  // namespace

QuadraticConstraint::QuadraticConstraint(double f0_in, Vec h_in, Mat g_in)
    : f0(f0_in), h(std::move(h_in)) {
  g = 0.5 * (g_in + g_in.transpose());
}

double QuadraticConstraint::value(const Vec& y) const {
  return f0 + h.dot(y) + y.dot(g * y);
}

Vec QuadraticConstraint::gradient(const Vec& y) const {
  return h + 2.0 * (g * y);
}

ManifoldSpec make_quadratic(double f0, const Vec& h, const Mat& g) {
  QuadraticConstraint q(f0, h, g);
  ManifoldSpec m;
  m.ambient_dim = static_cast<int>(h.size());
  m.num_constraints = 1;
  m.constraint_eval = [q](const Vec& x, Vec& f) { f[0] = q.value(x); };
  m.gradient_eval = [q](const Vec& x, Mat& grad) { grad.row(0) = q.gradient(x); };
  return m;
}

SdeProblem IntrinsicModel::as_problem() const {
  SdeProblem p;
  p.dim = dim;
  p.noise_dim = dim;
  p.drift = drift;
  auto diag = noise_diag;
  const int d = dim;
  p.noise = [diag, d](const Vec& x, double t, Mat& out) {
    out.setZero();
    thread_local Vec beta;
    beta.resize(d);
    diag(x, t, beta);
    for (int i = 0; i < d; ++i) out(i, i) = beta[i];
  };
  p.initial_state = initial;
  return p;
}

EnsembleOptions IntrinsicModel::ensemble_options() const {
  EnsembleOptions opt;
  opt.state_map = embed;
  opt.guards = guards;
  return opt;
}

std::complex<double> kubo_moment(int m, double t, double omega0, double b) {
  const std::complex<double> i(0.0, 1.0);
  return std::exp(i * (m * omega0 * t * t / 2.0) -
                  std::complex<double>(m * m * b * b * t / 2.0));
}

double catenoid_msd(double t) { return 2.0 * t; }

double hypersphere_msd(int n, double t) {
  return 2.0 * (1.0 - std::exp(-0.5 * (n - 1) * t));
}

namespace {

CatalogEntry make_circle(const std::map<std::string, double>& params) {
  const double omega0 = get_param(params, "omega0", 2.5);
  const double b = get_param(params, "b", 1.0);
  CatalogEntry e;
  e.name = "circle";
  e.params = {{"omega0", omega0}, {"b", b}};
  e.manifold = make_quadratic(-1.0, Vec::Zero(2), Mat::Identity(2, 2));

  e.problem.dim = 2;
  e.problem.noise_dim = 2;
  e.problem.identity_noise = true;
  e.problem.noise_scale = b;
  e.problem.drift = [omega0](const Vec& x, double t, Vec& a) {
    unit_rotation(x, a);
    a *= omega0 * t;
  };
  e.problem.manifold = e.manifold;
  e.problem.initial_state = Vec{{1.0, 0.0}};

  e.observables.push_back({"x", [](const Vec& x) { return x[0]; }});
  e.observables.push_back({"y", [](const Vec& x) { return x[1]; }});
  e.oracles["x"] = [omega0, b](double t) { return kubo_moment(1, t, omega0, b).real(); };
  e.oracles["y"] = [omega0, b](double t) { return kubo_moment(1, t, omega0, b).imag(); };

  IntrinsicModel im;
  im.dim = 1;
  im.drift = [omega0](const Vec&, double t, Vec& a) { a[0] = omega0 * t; };
  im.noise_diag = [b](const Vec&, double, Vec& beta) { beta[0] = b; };
  im.embed = [](const Vec& phi, Vec& x) {
    x.resize(2);
    x[0] = std::cos(phi[0]);
    x[1] = std::sin(phi[0]);
  };
  im.initial = Vec{{0.0}};
  e.intrinsic = im;
  return e;
}

CatalogEntry make_hypersphere(const std::map<std::string, double>& params,
                              int default_n) {
  const int n = static_cast<int>(get_param(params, "n", default_n));
  if (n < 2) throw ConfigError("n", "hypersphere needs ambient dimension n >= 2");
  CatalogEntry e;
  e.name = "hypersphere";
  e.params = {{"n", static_cast<double>(n)}};
  e.manifold = make_quadratic(-1.0, Vec::Zero(n), Mat::Identity(n, n));
  e.manifold.exact_normal_projection = [](const Vec& x, Vec& y) { y = x / x.norm(); };

  e.problem.dim = n;
  e.problem.noise_dim = n;
  e.problem.identity_noise = true;
  e.problem.drift = [](const Vec&, double, Vec& a) { a.setZero(); };
  e.problem.manifold = e.manifold;
  e.problem.initial_state = Vec::Unit(n, 0);

  e.observables.push_back(dist_sq_observable(Vec::Unit(n, 0)));
  e.oracles["dist_sq"] = [n](double t) { return hypersphere_msd(n, t); };

  if (n == 3) {
    IntrinsicModel im;
    im.dim = 2;  // (theta, phi)
    im.drift = [](const Vec& p, double, Vec& a) {
      a[0] = 0.5 / std::tan(p[0]);
      a[1] = 0.0;
    };
    im.noise_diag = [](const Vec& p, double, Vec& beta) {
      beta[0] = 1.0;
      beta[1] = 1.0 / std::sin(p[0]);
    };
    im.embed = [](const Vec& p, Vec& x) {
      x.resize(3);
      x[0] = std::sin(p[0]) * std::cos(p[1]);
      x[1] = std::sin(p[0]) * std::sin(p[1]);
      x[2] = std::cos(p[0]);
    };
    im.initial = Vec{{kPi / 2.0, 0.0}};
    e.intrinsic = im;
    e.problem.initial_state = Vec{{1.0, 0.0, 0.0}};
  }
  return e;
}

CatalogEntry make_spheroid(const std::map<std::string, double>& params) {
  const double c = get_param(params, "c", 0.25);
  if (!(c > 0.0)) throw ConfigError("c", "spheroid needs c > 0");
  CatalogEntry e;
  e.name = "spheroid";
  e.params = {{"c", c}};
  Mat g = Mat::Identity(3, 3);
  g(2, 2) = 1.0 / (c * c);
  e.manifold = make_quadratic(-1.0, Vec::Zero(3), g);

  const double th0 = 1.0, ph0 = 1.0;
  Vec x0{{std::sin(th0) * std::cos(ph0), std::sin(th0) * std::sin(ph0),
          c * std::cos(th0)}};

  e.problem.dim = 3;
  e.problem.noise_dim = 3;
  e.problem.identity_noise = true;
  e.problem.drift = [](const Vec&, double, Vec& a) { a.setZero(); };
  e.problem.manifold = e.manifold;
  e.problem.initial_state = x0;

  e.observables.push_back({"great_circle", [x0, g](const Vec& x) {
                             double q = x.dot(g * x0);
                             q = std::min(1.0, std::max(-1.0, q));
                             return std::acos(q);
                           }});
  e.observables.push_back(dist_sq_observable(x0));

  IntrinsicModel im;
  im.dim = 2;  // (theta, phi)
  im.drift = [c](const Vec& p, double, Vec& a) {
    const double ct = std::cos(p[0]), st = std::sin(p[0]);
    const double A = ct * ct + c * c * st * st;
    a[0] = ct / st / (2.0 * A);
    a[1] = 0.0;
  };
  im.noise_diag = [c](const Vec& p, double, Vec& beta) {
    const double ct = std::cos(p[0]), st = std::sin(p[0]);
    const double A = ct * ct + c * c * st * st;
    beta[0] = 1.0 / std::sqrt(A);
    beta[1] = 1.0 / st;
  };
  // The (theta, phi) chart extends smoothly through theta = 0 as a double
  // cover (theta -> -theta lands at phi + pi), so pole crossings need no
  // rejection band; non-finite states are caught by the ensemble loop.
  im.embed = [c](const Vec& p, Vec& x) {
    x.resize(3);
    x[0] = std::sin(p[0]) * std::cos(p[1]);
    x[1] = std::sin(p[0]) * std::sin(p[1]);
    x[2] = c * std::cos(p[0]);
  };
  im.initial = Vec{{th0, ph0}};
  e.intrinsic = im;
  return e;
}

CatalogEntry make_hyperboloid(const std::map<std::string, double>& params) {
  const double c = get_param(params, "c", 0.25);
  if (!(c > 0.0)) throw ConfigError("c", "hyperboloid needs c > 0");
  CatalogEntry e;
  e.name = "hyperboloid";
  e.params = {{"c", c}};
  Mat g = Mat::Identity(3, 3);
  g(2, 2) = -1.0 / (c * c);
  e.manifold = make_quadratic(-1.0, Vec::Zero(3), g);

  Vec x0{{1.0, 0.0, 0.0}};  // theta = v = 0
  e.problem.dim = 3;
  e.problem.noise_dim = 3;
  e.problem.identity_noise = true;
  e.problem.drift = [](const Vec&, double, Vec& a) { a.setZero(); };
  e.problem.manifold = e.manifold;
  e.problem.initial_state = x0;
  e.observables.push_back(dist_sq_observable(x0));

  IntrinsicModel im;
  im.dim = 2;  // (v, theta)
  im.drift = [c](const Vec& p, double, Vec& a) {
    const double sh = std::sinh(p[0]), ch = std::cosh(p[0]);
    const double H = sh * sh + c * c * ch * ch;
    a[0] = std::tanh(p[0]) / (2.0 * H);
    a[1] = 0.0;
  };
  im.noise_diag = [c](const Vec& p, double, Vec& beta) {
    const double sh = std::sinh(p[0]), ch = std::cosh(p[0]);
    const double H = sh * sh + c * c * ch * ch;
    beta[0] = 1.0 / std::sqrt(H);
    beta[1] = 1.0 / ch;
  };
  // The theta period is 2*pi for the full surface of revolution; the
  // embedding is periodic so no wrapping is needed.
  im.embed = [c](const Vec& p, Vec& x) {
    x.resize(3);
    x[0] = std::cosh(p[0]) * std::cos(p[1]);
    x[1] = std::cosh(p[0]) * std::sin(p[1]);
    x[2] = c * std::sinh(p[0]);
  };
  im.initial = Vec{{0.0, 0.0}};
  e.intrinsic = im;
  return e;
}

CatalogEntry make_catenoid() {
  CatalogEntry e;
  e.name = "catenoid";
  ManifoldSpec m;
  m.ambient_dim = 3;
  m.num_constraints = 1;
  m.constraint_eval = [](const Vec& x, Vec& f) {
    const double sh = std::sinh(x[2]);
    f[0] = x[0] * x[0] + x[1] * x[1] - sh * sh - 1.0;
  };
  m.gradient_eval = [](const Vec& x, Mat& grad) {
    grad(0, 0) = 2.0 * x[0];
    grad(0, 1) = 2.0 * x[1];
    grad(0, 2) = -std::sinh(2.0 * x[2]);
  };
  e.manifold = m;

  Vec x0{{1.0, 0.0, 0.0}};  // v = theta = 0
  e.problem.dim = 3;
  e.problem.noise_dim = 3;
  e.problem.identity_noise = true;
  e.problem.drift = [](const Vec&, double, Vec& a) { a.setZero(); };
  e.problem.manifold = e.manifold;
  e.problem.initial_state = x0;
  e.observables.push_back(dist_sq_observable(x0));
  e.oracles["dist_sq"] = [](double t) { return catenoid_msd(t); };

  IntrinsicModel im;
  im.dim = 2;  // (v, theta); conformal metric cosh^2(v) (dv^2 + dtheta^2)
  im.drift = [](const Vec& p, double, Vec& a) {
    const double ch = std::cosh(p[0]);
    a[0] = std::tanh(p[0]) / (2.0 * ch * ch);
    a[1] = 0.0;
  };
  im.noise_diag = [](const Vec& p, double, Vec& beta) {
    const double ch = std::cosh(p[0]);
    beta[0] = 1.0 / ch;
    beta[1] = 1.0 / ch;
  };
  im.embed = [](const Vec& p, Vec& x) {
    x.resize(3);
    x[0] = std::cosh(p[0]) * std::cos(p[1]);
    x[1] = std::cosh(p[0]) * std::sin(p[1]);
    x[2] = p[0];
  };
  im.initial = Vec{{0.0, 0.0}};
  e.intrinsic = im;
  return e;
}

CatalogEntry make_polynomial(const std::map<std::string, double>& params) {
  const int order = static_cast<int>(get_param(params, "N", 4));
  const int n = static_cast<int>(get_param(params, "n", 3));
  if (order < 2 || order % 2 != 0) throw ConfigError("N", "polynomial needs even N >= 2");
  if (n < 2) throw ConfigError("n", "polynomial needs ambient dimension n >= 2");
  CatalogEntry e;
  e.name = "polynomial";
  e.params = {{"N", static_cast<double>(order)}, {"n", static_cast<double>(n)}};

  ManifoldSpec m;
  m.ambient_dim = n;
  m.num_constraints = 1;
  m.constraint_eval = [order, n](const Vec& x, Vec& f) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += std::pow(x[i], order);
    f[0] = s - 1.0;
  };
  m.gradient_eval = [order, n](const Vec& x, Mat& grad) {
    for (int i = 0; i < n; ++i) grad(0, i) = order * std::pow(x[i], order - 1);
  };
  e.manifold = m;

  e.problem.dim = n;
  e.problem.noise_dim = n;
  e.problem.identity_noise = true;
  // outward axial force along the last coordinate
  e.problem.drift = [n](const Vec& x, double, Vec& a) {
    a.setZero();
    a[n - 1] = 2.0 * x[n - 1];
  };
  e.problem.manifold = e.manifold;
  e.problem.initial_state = Vec::Unit(n, 0);
  e.observables.push_back(dist_sq_observable(Vec::Unit(n, 0)));
  return e;
}

CatalogEntry make_sphere_plane(const std::map<std::string, double>& params) {
  const double omega0 = get_param(params, "omega0", 0.0);
  const double b = get_param(params, "b", 1.0);
  CatalogEntry e;
  e.name = "sphere-plane";
  e.params = {{"omega0", omega0}, {"b", b}};

  ManifoldSpec m;
  m.ambient_dim = 3;
  m.num_constraints = 2;
  m.constraint_eval = [](const Vec& x, Vec& f) {
    f[0] = x.squaredNorm() - 1.0;
    f[1] = x[2];
  };
  m.gradient_eval = [](const Vec& x, Mat& grad) {
    grad.row(0) = 2.0 * x.transpose();
    grad.row(1) << 0.0, 0.0, 1.0;
  };
  e.manifold = m;

  e.problem.dim = 3;
  e.problem.noise_dim = 3;
  e.problem.identity_noise = true;
  e.problem.noise_scale = b;
  e.problem.drift = [omega0](const Vec& x, double t, Vec& a) {
    unit_rotation(x, a);
    a *= omega0 * t;
  };
  e.problem.manifold = e.manifold;
  e.problem.initial_state = Vec{{1.0, 0.0, 0.0}};

  e.observables.push_back({"x", [](const Vec& x) { return x[0]; }});
  e.observables.push_back({"abs_f_sphere", [](const Vec& x) {
                             return std::abs(x.squaredNorm() - 1.0);
                           }});
  e.observables.push_back({"abs_f_plane", [](const Vec& x) { return std::abs(x[2]); }});
  e.oracles["x"] = [omega0, b](double t) { return kubo_moment(1, t, omega0, b).real(); };
  return e;
}

}  // namespace

CatalogEntry catalog(const std::string& name,
                     const std::map<std::string, double>& params) {
  if (name == "circle" || name == "kubo") return make_circle(params);
  if (name == "hypersphere") return make_hypersphere(params, 10);
  if (name == "sphere") return make_hypersphere(params, 3);
  if (name == "spheroid") return make_spheroid(params);
  if (name == "hyperboloid") return make_hyperboloid(params);
  if (name == "catenoid") return make_catenoid();
  if (name == "polynomial") return make_polynomial(params);
  if (name == "sphere-plane" || name == "sphere_plane") return make_sphere_plane(params);
  throw ConfigError("manifold", "unknown manifold '" + name + "'");
}

IntrinsicModel intrinsic_model(const CatalogEntry& entry) {
  if (!entry.intrinsic.has_value()) {
    std::ostringstream os;
    os << "no intrinsic model for catalog entry '" << entry.name << "'";
    if (entry.name == "hypersphere") os << " (only n = 3 has one)";
    throw NotAvailableError(os.str());
  }
  return *entry.intrinsic;
}

}  // namespace strata
