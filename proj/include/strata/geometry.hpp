#pragma once

#include <functional>
#include <optional>

#include "strata/types.hpp"

namespace strata {

/// Implicit constraint system f: R^n -> R^p with analytic gradients.
///
/// The manifold is the zero set of f. Gradient row j is grad f^j, the j-th
/// (unnormalized) normal vector. An exact normal projection may be supplied
/// for manifolds that admit one (spheres: x -> x/|x|); when present it is
/// used instead of the iterative projection.
struct ManifoldSpec {
  int ambient_dim = 0;
  int num_constraints = 0;
  std::function<void(const Vec&, Vec&)> constraint_eval;   // f(x), p values
  std::function<void(const Vec&, Mat&)> gradient_eval;     // p x n rows
  std::function<void(const Vec&, Vec&)> exact_normal_projection;  // optional

  bool has_exact_projection() const { return static_cast<bool>(exact_normal_projection); }
};

/// Orthonormalized normal-space basis at a point, together with the
/// projection matrix M^{ij} = v_perp^i . n^j used by the normal projection.
struct NormalFrame {
  Mat raw_gradients;       // p x n, rows grad f^j
  Mat normals;             // p x n, orthonormal rows
  Mat projection_matrix;   // p x p, lower triangular for Gram-Schmidt input order
};

/// Relative tolerance below which a Gram-Schmidt remainder counts as rank loss.
inline constexpr double kRankTolerance = 1e-10;

/// Evaluate the constraint vector f(x). Throws InvalidStateError on
/// non-finite input or dimension mismatch.
Vec eval_constraints(const ManifoldSpec& m, const Vec& x);

/// Evaluate the p x n gradient rows at x.
Mat constraint_gradients(const ManifoldSpec& m, const Vec& x);

/// Modified Gram-Schmidt orthonormalization of the rows of V.
/// Throws RankDeficiencyError naming the offending row when an intermediate
/// vector drops below tol_rank times the largest input row norm.
NormalFrame orthonormalize(const Mat& rows, double tol_rank = kRankTolerance);

/// Remove every normal component from delta: delta - sum_j n^j (delta . n^j).
Vec tangential_project(const Vec& delta, const Vec& x, const ManifoldSpec& m);

/// Same, against a precomputed frame.
Vec tangential_project(const Vec& delta, const NormalFrame& frame);

/// Iterative normal projection onto the manifold:
///   y <- y - sum_{i,j} n^i [M^-1]_{ij} f^j(y)
/// with the frame and M re-evaluated at each iterate, for max_iters passes.
/// Uses the exact projection instead when the spec provides one.
/// Throws DivergenceError if max_j |f^j| grows between iterations.
Vec normal_project(const Vec& x, const ManifoldSpec& m, int max_iters = 3);

namespace detail {

/// Scratch space shared by the in-place geometry kernels so the ensemble
/// loop never allocates.
struct GeometryWorkspace {
  Vec f;
  Mat grads;
  Mat normals;
  Mat m;          // projection matrix
  Vec coeff;      // Lagrange coefficients / dot products
  Vec tmp;        // exact-projection staging
  void resize(int n, int p) {
    f.resize(p);
    grads.resize(p, n);
    normals.resize(p, n);
    m.resize(p, p);
    coeff.resize(p);
    tmp.resize(n);
  }
};

/// Gram-Schmidt into ws.normals / ws.m from ws.grads. Throws on rank loss.
void orthonormalize_inplace(GeometryWorkspace& ws, double tol_rank = kRankTolerance);

/// Build the frame at x into ws (gradient eval + orthonormalize).
void frame_at(const ManifoldSpec& m, const Vec& x, GeometryWorkspace& ws);

/// delta -= sum_j n^j (delta . n^j) against the frame in ws.
void tangential_project_inplace(Vec& delta, const GeometryWorkspace& ws);

/// In-place normal projection of y (iterative or exact).
void normal_project_inplace(Vec& y, const ManifoldSpec& m, int max_iters,
                            GeometryWorkspace& ws);

}  // namespace detail

}  // namespace strata
