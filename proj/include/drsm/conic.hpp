#pragma once

#include <cstdint>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "drsm/common.hpp"
#include "drsm/constraints.hpp"
#include "drsm/numerics.hpp"
#include "drsm/objectives.hpp"

namespace drsm {

/// alpha in {+1,-1}^n, fixing the orthant cone K_alpha and its lattice.
struct SignVector {
  std::vector<int> alpha;

  explicit SignVector(std::vector<int> a) : alpha(std::move(a)) {
    for (int v : alpha)
      require(v == 1 || v == -1, "sign vector entries must be +1 or -1");
  }

  static SignVector all_plus(std::size_t n) { return SignVector(std::vector<int>(n, 1)); }

  std::size_t dim() const { return alpha.size(); }
  double at(std::size_t i) const { return double(alpha[i]); }
};

/// (a v b)_i = alpha_i * max(alpha_i a_i, alpha_i b_i)
inline Vec join_alpha(const Vec& a, const Vec& b, const SignVector& sv) {
  require_same_dim(a.size(), b.size(), "join_alpha");
  require_same_dim(a.size(), sv.dim(), "join_alpha");
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    double s = sv.at(i);
    r[i] = s * std::max(s * a[i], s * b[i]);
  }
  return r;
}

/// (a ^ b)_i = alpha_i * min(alpha_i a_i, alpha_i b_i)
inline Vec meet_alpha(const Vec& a, const Vec& b, const SignVector& sv) {
  require_same_dim(a.size(), b.size(), "meet_alpha");
  require_same_dim(a.size(), sv.dim(), "meet_alpha");
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    double s = sv.at(i);
    r[i] = s * std::min(s * a[i], s * b[i]);
  }
  return r;
}

/// Per-column sign of the data matrix; all nonzero entries of a column must
/// agree (all-zero columns default to +1).
inline SignVector infer_sign_vector(const Matrix& data) {
  std::vector<int> alpha(data.cols(), 0);
  for (std::size_t j = 0; j < data.cols(); ++j) {
    for (std::size_t i = 0; i < data.rows(); ++i) {
      double v = data(i, j);
      if (v == 0.0) continue;
      int s = v > 0.0 ? 1 : -1;
      if (alpha[j] == 0) {
        alpha[j] = s;
      } else if (alpha[j] != s) {
        throw std::invalid_argument("infer_sign_vector: column " + std::to_string(j) +
                                    " mixes positive and negative entries");
      }
    }
    if (alpha[j] == 0) alpha[j] = 1;
  }
  return SignVector(std::move(alpha));
}

/// f(x) = g(diag(alpha) x), gradient diag(alpha) grad_g(diag(alpha) x).
class FlippedObjective : public Objective {
 public:
  FlippedObjective(std::shared_ptr<const Objective> inner, SignVector sv)
      : inner_(std::move(inner)), sv_(std::move(sv)) {
    require(inner_ != nullptr, "flipped: null objective");
    require_same_dim(inner_->dim(), sv_.dim(), "flipped");
    Vec hi(sv_.dim());
    for (std::size_t i = 0; i < sv_.dim(); ++i) {
      // x_i ranges over alpha_i * [y-space range]; with a sign-consistent
      // y-box this is [0, alpha_i * ybar_i]
      double a = sv_.at(i) * inner_->box_lo()[i];
      double b = sv_.at(i) * inner_->box_hi()[i];
      require(std::min(a, b) >= -kFeasTol,
              "flipped: y-space box is not sign-consistent with alpha");
      hi[i] = std::max(a, b);
    }
    set_box(zeros(sv_.dim()), std::move(hi));
  }

  double eval(const Vec& x) const override { return inner_->eval(flip(x)); }

  Vec grad(const Vec& x) const override {
    Vec g = inner_->grad(flip(x));
    for (std::size_t i = 0; i < g.size(); ++i) g[i] *= sv_.at(i);
    return g;
  }

  std::string kind() const override { return "flipped:" + inner_->kind(); }

  Vec flip(const Vec& x) const {
    Vec y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = sv_.at(i) * x[i];
    return y;
  }

  const Objective& inner() const { return *inner_; }
  const SignVector& sign_vector() const { return sv_; }

 private:
  std::shared_ptr<const Objective> inner_;
  SignVector sv_;
};

struct FlipReduced {
  std::shared_ptr<const FlippedObjective> objective;
  DownClosedPolytope polytope;
};

/// Reduce max g(y) over {y : M y <= b, 0 <=_Ka y <=_Ka ybar} to a standard
/// DR-submodular problem via y = diag(alpha) x. The transformed constraint
/// matrix M diag(alpha) must be strictly positive; the x-space upper bound is
/// clamped to the tightest row bound, which leaves the feasible set intact.
inline FlipReduced flip_reduce(std::shared_ptr<const Objective> g, const SignVector& sv,
                               const Matrix& m, const Vec& b, const Vec& ybar) {
  require(g != nullptr, "flip_reduce: null objective");
  const std::size_t n = sv.dim();
  require_same_dim(g->dim(), n, "flip_reduce");
  require_same_dim(ybar.size(), n, "flip_reduce");
  require(m.rows() == b.size(), "flip_reduce: M rows must match b");
  require(m.rows() == 0 || m.cols() == n, "flip_reduce: M cols must match alpha");

  Matrix a(m.rows(), n);
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < n; ++j) {
      a(i, j) = m(i, j) * sv.at(j);
      if (a(i, j) <= 0.0)
        throw std::invalid_argument(
            "flip_reduce: transformed constraint matrix is not strictly positive at row " +
            std::to_string(i));
    }

  Vec ub(n);
  for (std::size_t j = 0; j < n; ++j) {
    ub[j] = sv.at(j) * ybar[j];
    require(ub[j] >= 0.0, "flip_reduce: ybar is not sign-consistent with alpha");
    for (std::size_t i = 0; i < m.rows(); ++i) ub[j] = std::min(ub[j], b[i] / a(i, j));
  }

  auto flipped = std::make_shared<FlippedObjective>(std::move(g), sv);
  return FlipReduced{flipped, DownClosedPolytope(std::move(a), b, std::move(ub))};
}

struct KalphaViolation {
  std::size_t i, j;
  double excess;  // alpha_i alpha_j H_ij, which should be <= 0
};

struct KalphaReport {
  int samples = 0;
  int offdiag_violations = 0;
  int diag_violations = 0;
  double max_excess = -std::numeric_limits<double>::infinity();
  std::vector<KalphaViolation> worst;  // one entry per violating (i, j) pair
};

/// Sampled second-order test of K_alpha-submodularity: flags every pair with
/// alpha_i alpha_j H_ij(x) > tol at some sampled interior point. Off-diagonal
/// counts test K_alpha-submodularity; the diagonal additionally tests the DR
/// strengthening, reported separately.
inline KalphaReport verify_kalpha(const Objective& obj, const SignVector& sv, int samples,
                                  double tol, std::uint64_t seed) {
  require_same_dim(obj.dim(), sv.dim(), "verify_kalpha");
  require(samples >= 1, "verify_kalpha: samples must be >= 1");
  Rng rng(seed);
  const std::size_t n = obj.dim();
  KalphaReport report;
  report.samples = samples;
  Matrix worst_excess(n, n, -std::numeric_limits<double>::infinity());
  auto grad_fn = [&](const Vec& x) { return obj.grad(x); };
  for (int s = 0; s < samples; ++s) {
    Vec x = sample_box_interior(obj, rng);
    Matrix hess = central_diff_hessian(grad_fn, x);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        double e = sv.at(i) * sv.at(j) * hess(i, j);
        worst_excess(i, j) = std::max(worst_excess(i, j), e);
        report.max_excess = std::max(report.max_excess, e);
      }
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (worst_excess(i, j) > tol) {
        (i == j ? report.diag_violations : report.offdiag_violations) += 1;
        report.worst.push_back({i, j, worst_excess(i, j)});
      }
    }
  return report;
}

}  // namespace drsm
