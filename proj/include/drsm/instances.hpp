#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "drsm/algorithms.hpp"
#include "drsm/common.hpp"
#include "drsm/constraints.hpp"
#include "drsm/numerics.hpp"
#include "drsm/objectives.hpp"
#include "drsm/rng.hpp"

namespace drsm {

struct InstanceParams {
  std::size_t n = 0;
  std::size_t m = 0;
  double nu = 0.0;
  double b_scale = 1.0;
  std::string distribution;  // "uniform" or "exponential"
};

/// Serializable bundle: objective + polytope + generator provenance. The
/// provenance (generator, seed, params) regenerates the instance bit-exactly.
struct Instance {
  std::shared_ptr<const Objective> objective;
  DownClosedPolytope polytope;
  std::string generator;
  std::uint64_t seed = 0;
  InstanceParams params;

  std::string id() const {
    return generator + "-n" + std::to_string(params.n) + "-m" + std::to_string(params.m) +
           "-seed" + std::to_string(seed);
  }
};

constexpr double kNuDefault = 0.01;

/// Interval lower bound of 0.5 x^T H x + h^T x over [0, ubar], and the offset
/// that makes the quadratic nonnegative there:
///   LB = 0.5 sum_ij min(H_ij u_i u_j, 0) + sum_i min(h_i u_i, 0),
///   c  = -LB + 0.1 |LB|.
inline double nonneg_offset_bound(const Matrix& h_mat, const Vec& h_vec, const Vec& ubar) {
  require(h_mat.rows() == h_mat.cols(), "nonneg_offset_bound: H must be square");
  require_same_dim(h_mat.rows(), h_vec.size(), "nonneg_offset_bound");
  require_same_dim(h_mat.rows(), ubar.size(), "nonneg_offset_bound");
  if (!h_mat.is_symmetric())
    throw std::invalid_argument("nonneg_offset_bound: H is not symmetric");
  for (double u : ubar) require(u >= 0.0, "nonneg_offset_bound: ubar must be >= 0");
  double lb = 0.0;
  for (std::size_t i = 0; i < h_mat.rows(); ++i)
    for (std::size_t j = 0; j < h_mat.cols(); ++j)
      lb += 0.5 * std::min(h_mat(i, j) * ubar[i] * ubar[j], 0.0);
  for (std::size_t i = 0; i < h_vec.size(); ++i)
    lb += std::min(h_vec[i] * ubar[i], 0.0);
  return -lb + 0.1 * std::abs(lb);
}

namespace detail {

// substream tags for per-matrix draws
constexpr std::uint64_t kTagH = 1, kTagA = 2, kTagEigen = 3, kTagUnitary = 4;

inline Matrix draw_matrix(std::size_t rows, std::size_t cols, Rng rng,
                          double (*draw)(Rng&)) {
  Matrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = draw(rng);
  return m;
}

inline Instance make_quadratic(std::size_t n, std::size_t m, std::uint64_t seed,
                               const std::string& distribution) {
  require(n >= 1 && m >= 1, "quadratic generator: n and m must be >= 1");
  Rng root(seed);

  Matrix h_raw, a;
  if (distribution == "uniform") {
    h_raw = draw_matrix(n, n, root.fork(kTagH),
                        [](Rng& r) { return r.uniform(-1.0, 0.0); });
    a = draw_matrix(m, n, root.fork(kTagA),
                    [](Rng& r) { return r.uniform(kNuDefault, kNuDefault + 1.0); });
  } else if (distribution == "exponential") {
    h_raw = draw_matrix(n, n, root.fork(kTagH),
                        [](Rng& r) { return -r.exponential(1.0); });
    a = draw_matrix(m, n, root.fork(kTagA),
                    [](Rng& r) { return r.exponential(0.25) + kNuDefault; });
  } else {
    throw std::invalid_argument("quadratic generator: unknown distribution " + distribution);
  }
  Matrix h_mat = symmetrize(h_raw);

  Vec b = ones(m);
  Vec ubar = tightest_upper_bound(a, b);
  // h = -0.2 H^T ubar makes the objective non-monotone
  Vec h_vec = scale(h_mat.apply_transpose(ubar), -0.2);
  double c = nonneg_offset_bound(h_mat, h_vec, ubar);

  Instance inst{std::make_shared<QuadraticObjective>(h_mat, h_vec, c, ubar),
                DownClosedPolytope(std::move(a), std::move(b), ubar),
                distribution == "uniform" ? "quad-uniform" : "quad-exp",
                seed,
                InstanceParams{n, m, kNuDefault, 1.0, distribution}};
  return inst;
}

}  // namespace detail

/// H symmetric with uniform [-1, 0] entries, A uniform [nu, nu+1], b = 1,
/// ubar the tightest bound, h = -0.2 H^T ubar, c from nonneg_offset_bound.
inline Instance gen_quadratic_uniform(std::size_t n, std::size_t m, std::uint64_t seed) {
  return detail::make_quadratic(n, m, seed, "uniform");
}

/// -H entries Exp(1) then symmetrized, A entries Exp(0.25) + nu; otherwise as
/// the uniform recipe.
inline Instance gen_quadratic_exponential(std::size_t n, std::size_t m, std::uint64_t seed) {
  return detail::make_quadratic(n, m, seed, "exponential");
}

/// DPP kernel with spectrum drawn uniformly from [0, 1.5] rotated by a random
/// orthogonal basis; polytope as the uniform quadratic recipe except b = 2.
/// The box bound is additionally capped at 1, the softmax extension's domain.
inline Instance gen_softmax(std::size_t n, std::size_t m, std::uint64_t seed) {
  require(n >= 1 && m >= 1, "softmax generator: n and m must be >= 1");
  Rng root(seed);

  Rng eig_rng = root.fork(detail::kTagEigen);
  Vec d(n);
  for (std::size_t i = 0; i < n; ++i) d[i] = eig_rng.uniform(0.0, 1.5);
  Matrix u = random_orthogonal(n, root.fork(detail::kTagUnitary).next_u64());
  Matrix kernel(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < n; ++k) s += u(i, k) * d[k] * u(j, k);
      kernel(i, j) = s;
    }
  kernel = symmetrize(kernel);

  Matrix a = detail::draw_matrix(m, n, root.fork(detail::kTagA), [](Rng& r) {
    return r.uniform(kNuDefault, kNuDefault + 1.0);
  });
  Vec b = constant(m, 2.0);
  Vec ubar = tightest_upper_bound(a, b);
  for (double& v : ubar) v = std::min(v, 1.0);

  Instance inst{std::make_shared<SoftmaxObjective>(std::move(kernel)),
                DownClosedPolytope(std::move(a), std::move(b), std::move(ubar)),
                "softmax",
                seed,
                InstanceParams{n, m, kNuDefault, 2.0, "uniform"}};
  return inst;
}

struct OracleResult {
  Vec x;
  double value = -std::numeric_limits<double>::infinity();
  bool grid_used = false;
};

constexpr std::size_t kOracleGridDimCap = 6;

/// Desk-scale global-optimum oracle: enumerate a grid over [0, ubar] filtered
/// by feasibility, then polish with multi-start Frank-Wolfe from the best
/// grid point and random feasible starts. Returns the best feasible point
/// seen anywhere, a certified lower bound on the true optimum. Dimensions
/// above the grid cap fall back to polish-only (flagged via grid_used).
inline OracleResult brute_force_opt(const Objective& obj, const DownClosedPolytope& p,
                                    int grid_points_per_axis, int polish_restarts,
                                    std::uint64_t seed) {
  require(grid_points_per_axis >= 2, "brute_force_opt: need at least 2 grid points");
  require(polish_restarts >= 0, "brute_force_opt: restarts must be >= 0");
  const std::size_t n = p.dim();

  OracleResult best;
  auto consider = [&](const Vec& x, double value) {
    if (value > best.value) {
      best.value = value;
      best.x = x;
    }
  };

  if (n <= kOracleGridDimCap) {
    best.grid_used = true;
    const std::size_t g = std::size_t(grid_points_per_axis);
    std::vector<std::size_t> idx(n, 0);
    Vec x(n, 0.0);
    for (;;) {
      for (std::size_t j = 0; j < n; ++j)
        x[j] = p.ubar()[j] * double(idx[j]) / double(g - 1);
      if (contains(p, x, kFeasTol)) consider(x, obj.eval(x));
      // odometer over the grid
      std::size_t j = 0;
      while (j < n && ++idx[j] == g) idx[j++] = 0;
      if (j == n) break;
    }
  }

  Rng rng(seed);
  std::vector<Vec> starts;
  if (best.grid_used && !best.x.empty()) starts.push_back(best.x);
  for (int r = 0; r < polish_restarts; ++r) starts.push_back(sample_feasible(p, rng));

  for (const Vec& x0 : starts) {
    FwResult run = nonconvex_frank_wolfe(obj, p, 100, 1e-9, x0);
    for (std::size_t k = 0; k < run.trace.size(); ++k)
      consider(run.trace.iterates[k], run.trace.values[k]);
  }
  if (best.x.empty()) {  // no grid, no restarts: fall back to the origin
    Vec origin = zeros(n);
    consider(origin, obj.eval(origin));
  }
  return best;
}

}  // namespace drsm
