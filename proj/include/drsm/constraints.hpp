#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "drsm/common.hpp"
#include "drsm/lp.hpp"
#include "drsm/numerics.hpp"
#include "drsm/rng.hpp"

namespace drsm {

constexpr double kFeasTol = 1e-9;

/// ubar_j = min_i b_i / A_ij, the tightest per-coordinate bound implied by
/// A x <= b over the nonnegative orthant. Negative entries are rejected;
/// zero entries impose no bound, so every column needs a positive entry.
inline Vec tightest_upper_bound(const Matrix& a, const Vec& b) {
  require(a.rows() == b.size(), "tightest_upper_bound: A rows must match b");
  require(a.rows() >= 1, "tightest_upper_bound: at least one constraint row required");
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      require(a(i, j) >= 0.0, "tightest_upper_bound: negative A entry at (" +
                                  std::to_string(i) + "," + std::to_string(j) + ")");
  Vec ubar(a.cols(), std::numeric_limits<double>::infinity());
  for (std::size_t j = 0; j < a.cols(); ++j) {
    for (std::size_t i = 0; i < a.rows(); ++i)
      if (a(i, j) > 0.0) ubar[j] = std::min(ubar[j], b[i] / a(i, j));
    require(std::isfinite(ubar[j]),
            "tightest_upper_bound: column " + std::to_string(j) + " is all zero");
  }
  return ubar;
}

/// {x >= 0 : A x <= b, x <= ubar} with A >= 0 and b >= 0, so 0 is feasible
/// and down-closedness holds by construction. ubar never exceeds the bound
/// implied by any single constraint row, which leaves the feasible set
/// unchanged. nu records the smallest entry of A.
class DownClosedPolytope {
 public:
  DownClosedPolytope(Matrix a, Vec b, Vec ubar)
      : a_(std::move(a)), b_(std::move(b)), ubar_(std::move(ubar)) {
    require(a_.rows() == b_.size(), "polytope: A rows must match b");
    require(a_.rows() == 0 || a_.cols() == ubar_.size(), "polytope: A cols must match ubar");
    nu_ = std::numeric_limits<double>::infinity();
    for (double v : a_.data()) {
      require(v >= 0.0, "polytope: A entries must be nonnegative");
      nu_ = std::min(nu_, v);
    }
    if (a_.data().empty()) nu_ = 0.0;
    for (double v : b_) require(v >= 0.0, "polytope: b must be nonnegative");
    for (std::size_t j = 0; j < ubar_.size(); ++j) {
      require(ubar_[j] >= 0.0, "polytope: ubar must be nonnegative");
      for (std::size_t i = 0; i < a_.rows(); ++i) {
        if (a_(i, j) > 0.0)
          require(ubar_[j] <= b_[i] / a_(i, j) + kFeasTol,
                  "polytope: ubar exceeds the bound of row " + std::to_string(i) +
                      " at coordinate " + std::to_string(j));
      }
    }
  }

  /// Pure box [0, ubar] (no inequality rows).
  static DownClosedPolytope box(Vec ubar) {
    return DownClosedPolytope(Matrix(0, ubar.size()), Vec{}, std::move(ubar));
  }

  std::size_t dim() const { return ubar_.size(); }
  std::size_t num_rows() const { return a_.rows(); }
  const Matrix& a() const { return a_; }
  const Vec& b() const { return b_; }
  const Vec& ubar() const { return ubar_; }
  double nu() const { return nu_; }

 private:
  Matrix a_;
  Vec b_;
  Vec ubar_;
  double nu_;
};

inline bool contains(const DownClosedPolytope& p, const Vec& x, double tol = kFeasTol) {
  require_same_dim(x.size(), p.dim(), "contains");
  for (std::size_t j = 0; j < x.size(); ++j)
    if (x[j] < -tol || x[j] > p.ubar()[j] + tol) return false;
  if (p.num_rows() > 0) {
    Vec ax = p.a().apply(x);
    for (std::size_t i = 0; i < ax.size(); ++i)
      if (ax[i] > p.b()[i] + tol) return false;
  }
  return true;
}

/// Q = P intersect {y : y <= ubar - x}; same rows, shrunken box.
inline DownClosedPolytope shrink(const DownClosedPolytope& p, const Vec& x) {
  if (!contains(p, x, kFeasTol))
    throw std::invalid_argument("shrink: point is not feasible");
  Vec ub(p.dim());
  for (std::size_t j = 0; j < p.dim(); ++j) ub[j] = std::max(0.0, p.ubar()[j] - x[j]);
  return DownClosedPolytope(p.a(), p.b(), ub);
}

/// argmax over P of <v, direction>.
inline Vec lmo(const DownClosedPolytope& p, const Vec& direction) {
  require_same_dim(direction.size(), p.dim(), "lmo");
  LinearProgram lp;
  lp.c = direction;
  lp.G = p.a();
  lp.g = p.b();
  lp.lo = zeros(p.dim());
  lp.hi = p.ubar();
  return maximize_linear(lp).x;
}

/// argmax over P intersect {v <= ubar - x_k} of <v, direction> (Alg. 2's LMO).
inline Vec shrunken_lmo(const DownClosedPolytope& p, const Vec& xk, const Vec& direction) {
  require_same_dim(xk.size(), p.dim(), "shrunken_lmo");
  require_same_dim(direction.size(), p.dim(), "shrunken_lmo");
  LinearProgram lp;
  lp.c = direction;
  lp.G = p.a();
  lp.g = p.b();
  lp.lo = zeros(p.dim());
  lp.hi.resize(p.dim());
  for (std::size_t j = 0; j < p.dim(); ++j)
    lp.hi[j] = std::max(0.0, p.ubar()[j] - xk[j]);
  return maximize_linear(lp).x;
}

/// Euclidean projection onto P by Dykstra's alternating projections over the
/// m halfspaces and the box [0, ubar]. Converges for any intersection of
/// convex sets; stops when one full sweep moves the iterate by <= tol.
inline Vec project(const DownClosedPolytope& p, const Vec& y, double tol = 1e-8,
                   int max_sweeps = 10000) {
  require_same_dim(y.size(), p.dim(), "project");
  const std::size_t n = p.dim();
  const std::size_t m = p.num_rows();

  Vec row_norm2(m, 0.0);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) row_norm2[i] += p.a()(i, j) * p.a()(i, j);

  Vec x(y);
  std::vector<Vec> incr(m + 1, zeros(n));  // Dykstra corrections, box last
  Vec prev(n), w(n);
  double delta = std::numeric_limits<double>::infinity();

  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    prev = x;
    for (std::size_t i = 0; i < m; ++i) {
      w = add(x, incr[i]);
      double viol = dot_row(p.a(), i, w) - p.b()[i];
      if (viol > 0.0 && row_norm2[i] > 0.0) {
        double f = viol / row_norm2[i];
        for (std::size_t j = 0; j < n; ++j) x[j] = w[j] - f * p.a()(i, j);
      } else {
        x = w;
      }
      incr[i] = sub(w, x);
    }
    w = add(x, incr[m]);
    for (std::size_t j = 0; j < n; ++j)
      x[j] = std::min(std::max(w[j], 0.0), p.ubar()[j]);
    incr[m] = sub(w, x);

    delta = norm_inf(sub(x, prev));
    if (delta <= tol) return x;
  }
  throw NumericalError("project: Dykstra did not converge in " +
                       std::to_string(max_sweeps) + " sweeps (last sweep moved " +
                       std::to_string(delta) + ")");
}

/// ||ubar||_2, the upper bound used for the diameter of P.
inline double diameter_bound(const DownClosedPolytope& p) { return norm2(p.ubar()); }

/// Random feasible point: a uniform box sample, rescaled onto the polytope
/// when it violates a row, then shrunk by a uniform factor for interior
/// coverage. Not a uniform sample over P; good enough for property checks.
inline Vec sample_feasible(const DownClosedPolytope& p, Rng& rng) {
  Vec u(p.dim());
  for (std::size_t j = 0; j < p.dim(); ++j) u[j] = rng.uniform(0.0, p.ubar()[j]);
  double worst = 1.0;
  for (std::size_t i = 0; i < p.num_rows(); ++i) {
    double ax = dot_row(p.a(), i, u);
    if (ax > p.b()[i]) {
      if (p.b()[i] <= 0.0) return zeros(p.dim());
      worst = std::min(worst, p.b()[i] / ax);
    }
  }
  double shrinkage = rng.uniform01();
  return scale(u, worst * shrinkage);
}

}  // namespace drsm
