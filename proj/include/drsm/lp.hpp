#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "drsm/common.hpp"
#include "drsm/numerics.hpp"

namespace drsm {

/// maximize c^T x  subject to  G x <= g,  lo <= x <= hi.
/// Lower bounds must be finite; +inf upper bounds are allowed.
struct LinearProgram {
  Vec c;
  Matrix G;  // p x n
  Vec g;
  Vec lo;
  Vec hi;
};

struct LpSolution {
  Vec x;
  double value = 0.0;
};

namespace detail {

constexpr double kLpTol = 1e-9;

// Dense tableau simplex, two phases, Bland's anti-cycling rule throughout:
// entering column is the lowest eligible index, leaving row breaks ratio
// ties by lowest basic index. Deterministic by construction.
class SimplexTableau {
 public:
  SimplexTableau(std::size_t nvars, const std::vector<Vec>& rows, const Vec& rhs)
      : nstruct_(nvars), nrows_(rows.size()) {
    nslack_ = nrows_;
    nart_ = 0;
    for (double r : rhs)
      if (r < 0.0) ++nart_;
    ncols_ = nstruct_ + nslack_ + nart_;
    t_.assign(nrows_, Vec(ncols_, 0.0));
    rhs_.resize(nrows_);
    basis_.resize(nrows_);
    banned_.assign(ncols_, false);

    std::size_t art = nstruct_ + nslack_;
    for (std::size_t i = 0; i < nrows_; ++i) {
      double sign = rhs[i] < 0.0 ? -1.0 : 1.0;
      for (std::size_t j = 0; j < nstruct_; ++j) t_[i][j] = sign * rows[i][j];
      t_[i][nstruct_ + i] = sign;  // slack
      rhs_[i] = sign * rhs[i];
      if (sign < 0.0) {
        t_[i][art] = 1.0;
        basis_[i] = art;
        ++art;
      } else {
        basis_[i] = nstruct_ + i;
      }
    }
  }

  bool needs_phase1() const { return nart_ > 0; }

  // phase 1: maximize -sum(artificials); feasible iff optimum ~ 0
  void run_phase1() {
    Vec cost(ncols_, 0.0);
    for (std::size_t j = nstruct_ + nslack_; j < ncols_; ++j) cost[j] = -1.0;
    double z = optimize(cost);
    if (z < -1e-7) throw InfeasibleError("lp: infeasible problem (phase-1 optimum " +
                                         std::to_string(-z) + ")");
    // drive leftover artificials out of the basis, then ban their columns
    for (std::size_t i = 0; i < nrows_; ++i) {
      if (basis_[i] < nstruct_ + nslack_) continue;
      std::size_t enter = ncols_;
      for (std::size_t j = 0; j < nstruct_ + nslack_; ++j) {
        if (std::abs(t_[i][j]) > kLpTol) {
          enter = j;
          break;
        }
      }
      if (enter < ncols_) pivot(i, enter);
      // else: redundant zero row, harmless to leave the artificial at value 0
    }
    for (std::size_t j = nstruct_ + nslack_; j < ncols_; ++j) banned_[j] = true;
  }

  double run_phase2(const Vec& struct_cost) {
    Vec cost(ncols_, 0.0);
    for (std::size_t j = 0; j < nstruct_; ++j) cost[j] = struct_cost[j];
    return optimize(cost);
  }

  Vec structural_solution() const {
    Vec x(nstruct_, 0.0);
    for (std::size_t i = 0; i < nrows_; ++i)
      if (basis_[i] < nstruct_) x[basis_[i]] = rhs_[i];
    return x;
  }

 private:
  // reduced-cost driven pivoting; returns the optimal objective value
  double optimize(Vec cost) {
    double z = 0.0;
    for (std::size_t i = 0; i < nrows_; ++i) {
      double cb = cost[basis_[i]];
      if (cb == 0.0) continue;
      z += cb * rhs_[i];
      for (std::size_t j = 0; j < ncols_; ++j) cost[j] -= cb * t_[i][j];
      cost[basis_[i]] = 0.0;
    }
    for (;;) {
      std::size_t enter = ncols_;
      for (std::size_t j = 0; j < ncols_; ++j) {
        if (!banned_[j] && cost[j] > kLpTol) {
          enter = j;
          break;
        }
      }
      if (enter == ncols_) return z;

      std::size_t leave = nrows_;
      double best_ratio = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < nrows_; ++i) {
        if (t_[i][enter] <= kLpTol) continue;
        double ratio = rhs_[i] / t_[i][enter];
        if (ratio < best_ratio - 1e-12 ||
            (ratio <= best_ratio + 1e-12 && (leave == nrows_ || basis_[i] < basis_[leave]))) {
          best_ratio = ratio;
          leave = i;
        }
      }
      if (leave == nrows_)
        throw NumericalError("lp: unbounded objective (internal error for box-bounded inputs)");

      pivot(leave, enter);
      double ce = cost[enter];
      z += ce * rhs_[leave];
      for (std::size_t j = 0; j < ncols_; ++j) cost[j] -= ce * t_[leave][j];
      cost[enter] = 0.0;
    }
  }

  void pivot(std::size_t row, std::size_t col) {
    double p = t_[row][col];
    for (std::size_t j = 0; j < ncols_; ++j) t_[row][j] /= p;
    rhs_[row] /= p;
    t_[row][col] = 1.0;
    for (std::size_t i = 0; i < nrows_; ++i) {
      if (i == row) continue;
      double f = t_[i][col];
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < ncols_; ++j) t_[i][j] -= f * t_[row][j];
      t_[i][col] = 0.0;
      rhs_[i] -= f * rhs_[row];
      if (rhs_[i] < 0.0 && rhs_[i] > -1e-12) rhs_[i] = 0.0;
    }
    basis_[row] = col;
  }

  std::size_t nstruct_, nrows_, nslack_, nart_, ncols_;
  std::vector<Vec> t_;
  Vec rhs_;
  std::vector<std::size_t> basis_;
  std::vector<bool> banned_;
};

}  // namespace detail

/// Vertex-optimal solution of a small dense LP. Deterministic (Bland's rule,
/// lowest-index tie breaking); throws InfeasibleError when no point satisfies
/// the constraints.
inline LpSolution maximize_linear(const LinearProgram& lp) {
  const std::size_t n = lp.c.size();
  require(lp.G.rows() == lp.g.size(), "lp: row count of G must match g");
  require(lp.G.rows() == 0 || lp.G.cols() == n, "lp: column count of G must match c");
  require_same_dim(lp.lo.size(), n, "lp bounds");
  require_same_dim(lp.hi.size(), n, "lp bounds");
  for (std::size_t j = 0; j < n; ++j) {
    require(std::isfinite(lp.lo[j]), "lp: lower bounds must be finite");
    require(lp.lo[j] <= lp.hi[j], "lp: lo > hi at coordinate " + std::to_string(j));
  }

  // shift to y = x - lo >= 0 and express finite upper bounds as rows
  std::vector<Vec> rows;
  Vec rhs;
  const std::size_t p = lp.G.rows();
  for (std::size_t i = 0; i < p; ++i) {
    Vec row(n);
    double shift = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      row[j] = lp.G(i, j);
      shift += lp.G(i, j) * lp.lo[j];
    }
    rows.push_back(std::move(row));
    rhs.push_back(lp.g[i] - shift);
  }
  for (std::size_t j = 0; j < n; ++j) {
    if (!std::isfinite(lp.hi[j])) continue;
    Vec row(n, 0.0);
    row[j] = 1.0;
    rows.push_back(std::move(row));
    rhs.push_back(lp.hi[j] - lp.lo[j]);
  }

  detail::SimplexTableau tab(n, rows, rhs);
  if (tab.needs_phase1()) tab.run_phase1();
  tab.run_phase2(lp.c);

  Vec y = tab.structural_solution();
  LpSolution sol;
  sol.x = add(y, lp.lo);
  sol.value = dot(lp.c, sol.x);
  return sol;
}

}  // namespace drsm
