#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "drsm/common.hpp"
#include "drsm/numerics.hpp"
#include "drsm/rng.hpp"

namespace drsm {

/// Common contract for every objective family: a value and a gradient over a
/// box domain. Objectives are immutable after construction and reentrant.
class Objective {
 public:
  virtual ~Objective() = default;

  std::size_t dim() const { return box_hi_.size(); }
  const Vec& box_lo() const { return box_lo_; }
  const Vec& box_hi() const { return box_hi_; }

  virtual double eval(const Vec& x) const = 0;
  virtual Vec grad(const Vec& x) const = 0;
  virtual std::string kind() const = 0;

  virtual std::optional<double> lipschitz_hint() const { return std::nullopt; }
  virtual std::optional<double> strong_dr_hint() const { return std::nullopt; }

  /// Exact maximizer of gamma -> f(x + gamma d) over [0, 1], where the family
  /// admits a closed form (quadratics). nullopt means: use a generic rule.
  virtual std::optional<double> exact_linesearch(const Vec&, const Vec&) const {
    return std::nullopt;
  }

 protected:
  void set_box(Vec lo, Vec hi) {
    require_same_dim(lo.size(), hi.size(), "objective box");
    for (std::size_t i = 0; i < lo.size(); ++i)
      require(lo[i] <= hi[i], "objective box: lo > hi");
    box_lo_ = std::move(lo);
    box_hi_ = std::move(hi);
  }

 private:
  Vec box_lo_, box_hi_;
};

/// f(x) = 0.5 x^T H x + h^T x + c with symmetric H. DR-submodular exactly
/// when every entry of H is nonpositive; require_dr=false admits planted
/// violations so the verifier has something to catch.
class QuadraticObjective : public Objective {
 public:
  QuadraticObjective(Matrix h_mat, Vec h_vec, double c, Vec ubar, bool require_dr = true)
      : h_mat_(std::move(h_mat)), h_vec_(std::move(h_vec)), c_(c) {
    require(h_mat_.rows() == h_mat_.cols(), "quadratic: H must be square");
    require_same_dim(h_mat_.rows(), h_vec_.size(), "quadratic");
    require_same_dim(h_mat_.rows(), ubar.size(), "quadratic");
    if (!h_mat_.is_symmetric())
      throw std::invalid_argument("quadratic: H is not symmetric");
    if (require_dr) {
      for (double v : h_mat_.data())
        require(v <= 0.0, "quadratic: positive H entry breaks DR-submodularity");
    }
    const std::size_t n = ubar.size();
    set_box(zeros(n), std::move(ubar));
  }

  double eval(const Vec& x) const override {
    Vec hx = h_mat_.apply(x);
    return 0.5 * dot(x, hx) + dot(h_vec_, x) + c_;
  }

  Vec grad(const Vec& x) const override {
    Vec g = h_mat_.apply(x);
    axpy(g, 1.0, h_vec_);
    return g;
  }

  std::string kind() const override { return "quadratic"; }

  std::optional<double> lipschitz_hint() const override { return h_mat_.frobenius_norm(); }

  std::optional<double> exact_linesearch(const Vec& x, const Vec& d) const override {
    return linesearch(x, d);
  }

  /// argmax over [0,1] of f(x + gamma d): closed form against the curvature
  /// d^T H d, endpoint comparison when the parabola is flat or convex.
  double linesearch(const Vec& x, const Vec& d) const {
    if (dot(d, d) == 0.0) return 0.0;
    Vec hd = h_mat_.apply(d);
    double curle = dot(d, hd);                 // d^T H d
    double slope = dot(d, grad(x));            // d f(x + g d)/dg at g=0
    if (curle < -1e-14 * std::max(1.0, dot(d, d))) {
      double star = -slope / curle;
      return std::min(1.0, std::max(0.0, star));
    }
    // flat or convex along d: maximum sits at an endpoint
    return slope + 0.5 * curle >= 0.0 ? 1.0 : 0.0;
  }

  const Matrix& quad_matrix() const { return h_mat_; }
  const Vec& linear_term() const { return h_vec_; }
  double offset() const { return c_; }

 private:
  Matrix h_mat_;
  Vec h_vec_;
  double c_;
};

/// Softmax extension of a DPP with PSD kernel K:
///   f(x) = log det(diag(x)(K - I) + I),  x in [0,1]^n.
/// The matrix is non-symmetric in general, so determinants and solves go
/// through LU with partial pivoting; PSD-ness of K is certified at
/// construction by factoring K + eps I.
class SoftmaxObjective : public Objective {
 public:
  explicit SoftmaxObjective(Matrix kernel) : kernel_(std::move(kernel)) {
    require(kernel_.rows() == kernel_.cols(), "softmax: kernel must be square");
    if (!kernel_.is_symmetric())
      throw std::invalid_argument("softmax: kernel is not symmetric");
    const std::size_t n = kernel_.rows();
    Matrix shifted = kernel_;
    double eps = 1e-10 * std::max(1.0, kernel_.max_abs());
    for (std::size_t i = 0; i < n; ++i) shifted(i, i) += eps;
    factor_logdet(shifted);  // PSD certificate: throws if an eigenvalue < -eps
    set_box(zeros(n), ones(n));
  }

  double eval(const Vec& x) const override {
    LuFactor lu(system_matrix(x));
    if (lu.det_sign() <= 0)
      throw NumericalError("softmax: non-positive determinant (numerical breakdown)");
    return lu.log_abs_det();
  }

  // grad_i = <row i of (K - I), column i of (diag(x)(K-I) + I)^{-1}>,
  // one factorization per call
  Vec grad(const Vec& x) const override {
    const std::size_t n = dim();
    LuFactor lu(system_matrix(x));
    Vec g(n, 0.0), e(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      e[i] = 1.0;
      Vec ci = lu.solve(e);  // column i of the inverse
      e[i] = 0.0;
      double s = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        double d_ij = kernel_(i, j) - (i == j ? 1.0 : 0.0);
        s += d_ij * ci[j];
      }
      g[i] = s;
    }
    return g;
  }

  std::string kind() const override { return "softmax"; }

  const Matrix& kernel() const { return kernel_; }

 private:
  Matrix system_matrix(const Vec& x) const {
    require_same_dim(x.size(), dim(), "softmax");
    const std::size_t n = dim();
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        double d = kernel_(i, j) - (i == j ? 1.0 : 0.0);
        m(i, j) = x[i] * d + (i == j ? 1.0 : 0.0);
      }
    return m;
  }

  Matrix kernel_;
};

/// Negative mean-field KL divergence for a log-submodular model, up to the
/// constant log Z:  g(x) = sum_S q_x(S) F(S) + sum_i Hb(x_i) with q_x the
/// fully factorized distribution and Hb the binary entropy. Exact enumeration
/// over the 2^n subsets; n is capped.
class MeanFieldKLObjective : public Objective {
 public:
  static constexpr std::size_t kMaxDim = 20;

  MeanFieldKLObjective(std::size_t n, Vec set_function_table, double delta = 1e-9)
      : n_(n), table_(std::move(set_function_table)), delta_(delta) {
    require(n >= 1 && n <= kMaxDim,
            "meanfield: dimension must be in [1, " + std::to_string(kMaxDim) + "]");
    require(table_.size() == (std::size_t{1} << n),
            "meanfield: table must have exactly 2^n entries");
    require(delta_ > 0.0 && delta_ < 0.5, "meanfield: delta must be in (0, 0.5)");
    set_box(zeros(n), ones(n));
  }

  double eval(const Vec& x) const override {
    require_same_dim(x.size(), n_, "meanfield");
    double multilinear = 0.0;
    const std::size_t count = table_.size();
    for (std::size_t s = 0; s < count; ++s) {
      double q = subset_weight(s, x);
      if (q != 0.0) multilinear += q * table_[s];
    }
    double entropy = 0.0;
    for (double xi : x) entropy += binary_entropy(clamp01(xi));
    return multilinear + entropy;
  }

  // grad_i = E_q[F(S u {i}) - F(S \ {i})] + log((1-x_i)/x_i)
  Vec grad(const Vec& x) const override {
    require_same_dim(x.size(), n_, "meanfield");
    Vec g(n_, 0.0);
    const std::size_t count = table_.size();
    for (std::size_t s = 0; s < count; ++s) {
      double q = subset_weight(s, x);
      if (q == 0.0) continue;
      for (std::size_t i = 0; i < n_; ++i) {
        const std::size_t bit = std::size_t{1} << i;
        g[i] += q * (table_[s | bit] - table_[s & ~bit]);
      }
    }
    for (std::size_t i = 0; i < n_; ++i) {
      double xi = clamp01(x[i]);
      g[i] += std::log((1.0 - xi) / xi);
    }
    return g;
  }

  std::string kind() const override { return "meanfield"; }

  const Vec& table() const { return table_; }
  double delta() const { return delta_; }

 private:
  double clamp01(double v) const { return std::min(1.0 - delta_, std::max(delta_, v)); }

  static double binary_entropy(double t) {
    return -t * std::log(t) - (1.0 - t) * std::log(1.0 - t);
  }

  double subset_weight(std::size_t mask, const Vec& x) const {
    double q = 1.0;
    for (std::size_t i = 0; i < n_; ++i)
      q *= (mask >> i) & 1 ? x[i] : 1.0 - x[i];
    return q;
  }

  std::size_t n_;
  Vec table_;
  double delta_;
};

enum class RegularizerKind { SmoothRational, CappedQuadratic };

/// Mean logistic loss with a non-convex separable regularizer:
///   f(x) = (1/m) sum_j log(1 + exp(-y_j x^T z^j)) + lambda r(x).
/// Every data column must be sign-consistent; the domain box runs from 0 to
/// ybox in each coordinate (ybox entries may be negative).
class LogisticObjective : public Objective {
 public:
  LogisticObjective(Matrix data, Vec labels, double lambda, RegularizerKind reg,
                    double gamma, Vec ybox)
      : data_(std::move(data)), labels_(std::move(labels)), lambda_(lambda),
        reg_(reg), gamma_(gamma), ybox_(std::move(ybox)) {
    require(data_.rows() == labels_.size(), "logistic: one label per data point");
    require_same_dim(data_.cols(), ybox_.size(), "logistic");
    require(lambda_ >= 0.0, "logistic: lambda must be nonnegative");
    require(gamma_ > 0.0, "logistic: gamma must be positive");
    for (double y : labels_)
      require(y == 1.0 || y == -1.0, "logistic: labels must be +1 or -1");
    for (std::size_t j = 0; j < data_.cols(); ++j) {
      int sign = 0;
      for (std::size_t i = 0; i < data_.rows(); ++i) {
        double v = data_(i, j);
        if (v == 0.0) continue;
        int s = v > 0.0 ? 1 : -1;
        if (sign == 0) sign = s;
        require(sign == s, "logistic: column " + std::to_string(j) +
                               " mixes positive and negative entries");
      }
    }
    Vec lo(ybox_.size()), hi(ybox_.size());
    for (std::size_t i = 0; i < ybox_.size(); ++i) {
      lo[i] = std::min(0.0, ybox_[i]);
      hi[i] = std::max(0.0, ybox_[i]);
    }
    set_box(std::move(lo), std::move(hi));
  }

  double eval(const Vec& x) const override {
    require_same_dim(x.size(), dim(), "logistic");
    double loss = 0.0;
    for (std::size_t j = 0; j < data_.rows(); ++j)
      loss += softplus(-labels_[j] * dot_row(data_, j, x));
    loss /= double(data_.rows());
    double reg = 0.0;
    for (double xi : x) reg += reg_value(xi);
    return loss + lambda_ * reg;
  }

  Vec grad(const Vec& x) const override {
    require_same_dim(x.size(), dim(), "logistic");
    Vec g(dim(), 0.0);
    for (std::size_t j = 0; j < data_.rows(); ++j) {
      double margin = labels_[j] * dot_row(data_, j, x);
      double w = -labels_[j] * sigmoid(-margin);
      for (std::size_t i = 0; i < dim(); ++i) g[i] += w * data_(j, i);
    }
    double inv_m = 1.0 / double(data_.rows());
    for (std::size_t i = 0; i < dim(); ++i)
      g[i] = g[i] * inv_m + lambda_ * reg_derivative(x[i]);
    return g;
  }

  std::string kind() const override { return "logistic"; }

  const Matrix& data() const { return data_; }
  const Vec& labels() const { return labels_; }
  double lambda() const { return lambda_; }
  RegularizerKind regularizer() const { return reg_; }
  double gamma() const { return gamma_; }
  const Vec& ybox() const { return ybox_; }

 private:
  static double softplus(double t) {
    return t > 0.0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t));
  }
  static double sigmoid(double t) {
    return t >= 0.0 ? 1.0 / (1.0 + std::exp(-t)) : std::exp(t) / (1.0 + std::exp(t));
  }

  double reg_value(double t) const {
    double q = gamma_ * t * t;
    return reg_ == RegularizerKind::SmoothRational ? q / (1.0 + q) : std::min(q, 1.0);
  }

  // capped-quadratic keeps the quadratic branch at the kink |t| = 1/sqrt(gamma)
  double reg_derivative(double t) const {
    double q = gamma_ * t * t;
    if (reg_ == RegularizerKind::SmoothRational) {
      double d = 1.0 + q;
      return 2.0 * gamma_ * t / (d * d);
    }
    return q <= 1.0 ? 2.0 * gamma_ * t : 0.0;
  }

  Matrix data_;
  Vec labels_;
  double lambda_;
  RegularizerKind reg_;
  double gamma_;
  Vec ybox_;
};

/// -f over the same box. Used for minimization problems (logistic loss) fed
/// into the maximization pipeline.
class NegatedObjective : public Objective {
 public:
  explicit NegatedObjective(std::shared_ptr<const Objective> inner)
      : inner_(std::move(inner)) {
    require(inner_ != nullptr, "negated: null objective");
    set_box(inner_->box_lo(), inner_->box_hi());
  }

  double eval(const Vec& x) const override { return -inner_->eval(x); }
  Vec grad(const Vec& x) const override { return scale(inner_->grad(x), -1.0); }
  std::string kind() const override { return "negated:" + inner_->kind(); }
  std::optional<double> lipschitz_hint() const override { return inner_->lipschitz_hint(); }

  const Objective& inner() const { return *inner_; }

 private:
  std::shared_ptr<const Objective> inner_;
};

/// Sampled Lipschitz constant of the gradient: max over random pairs of
/// ||grad(x) - grad(y)|| / ||x - y||. Quadratics report ||H||_F instead,
/// a certified upper bound on the spectral norm.
inline double estimate_lipschitz(const Objective& obj, int samples, std::uint64_t seed) {
  require(samples >= 2, "estimate_lipschitz: need at least 2 samples");
  if (const auto* q = dynamic_cast<const QuadraticObjective*>(&obj))
    return q->quad_matrix().frobenius_norm();
  Rng rng(seed);
  const Vec& lo = obj.box_lo();
  const Vec& hi = obj.box_hi();
  auto draw = [&] {
    Vec x(obj.dim());
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = rng.uniform(lo[i], hi[i]);
    return x;
  };
  double best = 0.0;
  for (int s = 0; s < samples; ++s) {
    Vec x = draw(), y = draw();
    double dist = norm2(sub(x, y));
    if (dist < 1e-12) continue;
    best = std::max(best, norm2(sub(obj.grad(x), obj.grad(y))) / dist);
  }
  return best;
}

/// Uniform sample in the objective's box, shrunk by a relative margin.
inline Vec sample_box_interior(const Objective& obj, Rng& rng, double margin = 0.05) {
  Vec x(obj.dim());
  for (std::size_t i = 0; i < x.size(); ++i) {
    double w = obj.box_hi()[i] - obj.box_lo()[i];
    x[i] = rng.uniform(obj.box_lo()[i] + margin * w, obj.box_hi()[i] - margin * w);
  }
  return x;
}

}  // namespace drsm
