#include "strata/geometry.hpp"

#include <cmath>
#include <sstream>

namespace strata {

namespace {

void check_finite(const Vec& x, const char* what) {
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i])) {
      std::ostringstream os;
      os << what << " has non-finite component at index " << i;
      throw InvalidStateError(os.str());
    }
  }
}

void check_dims(const ManifoldSpec& m, const Vec& x) {
  if (x.size() != m.ambient_dim) {
    std::ostringstream os;
    os << "state dimension " << x.size() << " does not match ambient_dim "
       << m.ambient_dim;
    throw InvalidStateError(os.str());
  }
}

}  // namespace

Vec eval_constraints(const ManifoldSpec& m, const Vec& x) {
  check_dims(m, x);
  check_finite(x, "constraint input");
  Vec f(m.num_constraints);
  m.constraint_eval(x, f);
  return f;
}

Mat constraint_gradients(const ManifoldSpec& m, const Vec& x) {
  check_dims(m, x);
  check_finite(x, "gradient input");
  Mat g(m.num_constraints, m.ambient_dim);
  m.gradient_eval(x, g);
  return g;
}

namespace detail {

void orthonormalize_inplace(GeometryWorkspace& ws, double tol_rank) {
  const int p = static_cast<int>(ws.grads.rows());
  double max_norm = 0.0;
  for (int j = 0; j < p; ++j) max_norm = std::max(max_norm, ws.grads.row(j).norm());
  const double floor = tol_rank * (max_norm > 0.0 ? max_norm : 1.0);

  ws.normals = ws.grads;
  for (int j = 0; j < p; ++j) {
    for (int i = 0; i < j; ++i) {
      const double proj = ws.normals.row(j).dot(ws.normals.row(i));
      ws.normals.row(j) -= proj * ws.normals.row(i);
    }
    const double nrm = ws.normals.row(j).norm();
    if (nrm <= floor) {
      std::ostringstream os;
      os << "gradient row " << j << " is linearly dependent (remainder norm "
         << nrm << " <= " << floor << ")";
      throw RankDeficiencyError(j, os.str());
    }
    ws.normals.row(j) /= nrm;
  }
  // M^{ij} = v_perp^i . n^j; lower triangular by construction.
  ws.m.noalias() = ws.grads * ws.normals.transpose();
}

void frame_at(const ManifoldSpec& m, const Vec& x, GeometryWorkspace& ws) {
  m.gradient_eval(x, ws.grads);
  orthonormalize_inplace(ws);
}

void tangential_project_inplace(Vec& delta, const GeometryWorkspace& ws) {
  const int p = static_cast<int>(ws.normals.rows());
  for (int j = 0; j < p; ++j) {
    const double d = delta.dot(ws.normals.row(j));
    delta -= d * ws.normals.row(j).transpose();
  }
}

void normal_project_inplace(Vec& y, const ManifoldSpec& m, int max_iters,
                            GeometryWorkspace& ws) {
  if (m.has_exact_projection()) {
    ws.tmp = y;
    m.exact_normal_projection(ws.tmp, y);
    return;
  }
  const int p = m.num_constraints;
  m.constraint_eval(y, ws.f);
  const double initial = ws.f.cwiseAbs().maxCoeff();
  const double growth_floor = 1e-13 * std::max(1.0, initial);
  const double runaway = 1e6 * std::max(1.0, initial);
  double cur = initial;
  for (int it = 0; it < max_iters; ++it) {
    frame_at(m, y, ws);
    // c = M^{-1} f, then y -= sum_i c_i n^i. M is lower triangular after
    // modified Gram-Schmidt, so forward substitution suffices.
    for (int i = 0; i < p; ++i) {
      double c = ws.f[i];
      for (int j = 0; j < i; ++j) c -= ws.m(i, j) * ws.coeff[j];
      ws.coeff[i] = c / ws.m(i, i);
    }
    for (int i = 0; i < p; ++i) y -= ws.coeff[i] * ws.normals.row(i).transpose();

    m.constraint_eval(y, ws.f);
    cur = ws.f.cwiseAbs().maxCoeff();
    if (!std::isfinite(cur) || cur > runaway) {
      std::ostringstream os;
      os << "normal projection diverged at iteration " << (it + 1) << ": max|f| = "
         << cur << " from " << initial << "; reduce the step-size";
      throw DivergenceError(it + 1, cur, os.str());
    }
  }
  // A single fixed-point pass may overshoot transiently near strong
  // curvature; divergence means the iteration ends no closer than it began.
  if (cur >= initial && cur > growth_floor) {
    std::ostringstream os;
    os << "normal projection diverged after " << max_iters
       << " iterations: max|f| went from " << initial << " to " << cur
       << "; reduce the step-size";
    throw DivergenceError(max_iters, cur, os.str());
  }
}

}  // namespace detail

NormalFrame orthonormalize(const Mat& rows, double tol_rank) {
  for (Eigen::Index r = 0; r < rows.rows(); ++r) {
    for (Eigen::Index c = 0; c < rows.cols(); ++c) {
      if (!std::isfinite(rows(r, c))) {
        throw InvalidStateError("orthonormalize: non-finite gradient entry");
      }
    }
  }
  detail::GeometryWorkspace ws;
  ws.resize(static_cast<int>(rows.cols()), static_cast<int>(rows.rows()));
  ws.grads = rows;
  detail::orthonormalize_inplace(ws, tol_rank);
  NormalFrame out;
  out.raw_gradients = rows;
  out.normals = ws.normals;
  out.projection_matrix = ws.m;
  return out;
}

Vec tangential_project(const Vec& delta, const NormalFrame& frame) {
  Vec out = delta;
  for (Eigen::Index j = 0; j < frame.normals.rows(); ++j) {
    const double d = out.dot(frame.normals.row(j));
    out -= d * frame.normals.row(j).transpose();
  }
  return out;
}

Vec tangential_project(const Vec& delta, const Vec& x, const ManifoldSpec& m) {
  check_dims(m, x);
  check_finite(x, "projection point");
  check_finite(delta, "projection input");
  return tangential_project(delta, orthonormalize(constraint_gradients(m, x)));
}

Vec normal_project(const Vec& x, const ManifoldSpec& m, int max_iters) {
  check_dims(m, x);
  check_finite(x, "normal projection input");
  detail::GeometryWorkspace ws;
  ws.resize(m.ambient_dim, m.num_constraints);
  Vec y = x;
  detail::normal_project_inplace(y, m, max_iters, ws);
  return y;
}

}  // namespace strata
