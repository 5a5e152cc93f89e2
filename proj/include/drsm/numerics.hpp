#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numeric>
#include <vector>

#include "drsm/common.hpp"
#include "drsm/rng.hpp"

namespace drsm {

/// Dense row-major matrix. The only linear algebra this project needs:
/// products, Cholesky (SPD log-det and solves), LU with partial pivoting
/// (general determinants), and Householder QR (random orthogonal matrices).
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  Vec apply(const Vec& x) const {
    require_same_dim(cols_, x.size(), "Matrix::apply");
    Vec y(rows_, 0.0);
    for (std::size_t i = 0; i < rows_; ++i) {
      double s = 0.0;
      const double* row = &data_[i * cols_];
      for (std::size_t j = 0; j < cols_; ++j) s += row[j] * x[j];
      y[i] = s;
    }
    return y;
  }

  Vec apply_transpose(const Vec& x) const {
    require_same_dim(rows_, x.size(), "Matrix::apply_transpose");
    Vec y(cols_, 0.0);
    for (std::size_t i = 0; i < rows_; ++i) {
      const double* row = &data_[i * cols_];
      for (std::size_t j = 0; j < cols_; ++j) y[j] += row[j] * x[i];
    }
    return y;
  }

  Matrix transpose() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  Matrix multiply(const Matrix& other) const {
    require_same_dim(cols_, other.rows_, "Matrix::multiply");
    Matrix out(rows_, other.cols_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t k = 0; k < cols_; ++k) {
        double a = (*this)(i, k);
        if (a == 0.0) continue;
        for (std::size_t j = 0; j < other.cols_; ++j) out(i, j) += a * other(k, j);
      }
    return out;
  }

  double max_abs() const {
    double s = 0.0;
    for (double v : data_) s = std::max(s, std::abs(v));
    return s;
  }

  double frobenius_norm() const {
    double s = 0.0;
    for (double v : data_) s += v * v;
    return std::sqrt(s);
  }

  bool is_symmetric(double rel_tol = 1e-12) const {
    if (rows_ != cols_) return false;
    double scale = std::max(1.0, max_abs());
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = i + 1; j < cols_; ++j)
        if (std::abs((*this)(i, j) - (*this)(j, i)) > rel_tol * scale) return false;
    return true;
  }

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<double> data_;
};

inline double dot_row(const Matrix& m, std::size_t i, const Vec& x) {
  require_same_dim(m.cols(), x.size(), "dot_row");
  double s = 0.0;
  for (std::size_t j = 0; j < m.cols(); ++j) s += m(i, j) * x[j];
  return s;
}

inline Matrix symmetrize(const Matrix& m) {
  require(m.rows() == m.cols(), "symmetrize: square matrix required");
  Matrix s(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) s(i, j) = 0.5 * (m(i, j) + m(j, i));
  return s;
}

/// Cholesky factorization of a symmetric positive-definite matrix.
/// Certifies SPD-ness as a side effect: a non-positive pivot throws.
class CholeskyFactor {
 public:
  explicit CholeskyFactor(const Matrix& m) : n_(m.rows()), l_(m) {
    require(m.rows() == m.cols(), "cholesky: square matrix required");
    if (!m.is_symmetric())
      throw std::invalid_argument("cholesky: matrix is not symmetric");
    for (std::size_t j = 0; j < n_; ++j) {
      double d = l_(j, j);
      for (std::size_t k = 0; k < j; ++k) d -= l_(j, k) * l_(j, k);
      if (!(d > 0.0))
        throw NumericalError("cholesky: non-positive pivot at index " +
                             std::to_string(j) + " (matrix not SPD)");
      double diag = std::sqrt(d);
      l_(j, j) = diag;
      for (std::size_t i = j + 1; i < n_; ++i) {
        double s = l_(i, j);
        for (std::size_t k = 0; k < j; ++k) s -= l_(i, k) * l_(j, k);
        l_(i, j) = s / diag;
      }
    }
    logdet_ = 0.0;
    for (std::size_t j = 0; j < n_; ++j) logdet_ += 2.0 * std::log(l_(j, j));
  }

  std::size_t dim() const { return n_; }
  double logdet() const { return logdet_; }

  Vec solve(const Vec& b) const {
    require_same_dim(b.size(), n_, "cholesky solve");
    Vec y(b);
    // forward substitution L y = b
    for (std::size_t i = 0; i < n_; ++i) {
      double s = y[i];
      for (std::size_t k = 0; k < i; ++k) s -= l_(i, k) * y[k];
      y[i] = s / l_(i, i);
    }
    // back substitution L^T x = y
    for (std::size_t ii = n_; ii-- > 0;) {
      double s = y[ii];
      for (std::size_t k = ii + 1; k < n_; ++k) s -= l_(k, ii) * y[k];
      y[ii] = s / l_(ii, ii);
    }
    return y;
  }

  Matrix solve(const Matrix& b) const {
    require_same_dim(b.rows(), n_, "cholesky solve");
    Matrix x(n_, b.cols());
    Vec col(n_);
    for (std::size_t j = 0; j < b.cols(); ++j) {
      for (std::size_t i = 0; i < n_; ++i) col[i] = b(i, j);
      Vec sol = solve(col);
      for (std::size_t i = 0; i < n_; ++i) x(i, j) = sol[i];
    }
    return x;
  }

 private:
  std::size_t n_ = 0;
  Matrix l_;  // lower triangle holds L; upper triangle is stale input
  double logdet_ = 0.0;
};

/// Factor an SPD matrix, certifying positive definiteness; the returned
/// factor carries log det(M) and is reusable for linear solves.
inline CholeskyFactor factor_logdet(const Matrix& m) { return CholeskyFactor(m); }

inline Vec solve_with_factor(const CholeskyFactor& f, const Vec& b) { return f.solve(b); }
inline Matrix solve_with_factor(const CholeskyFactor& f, const Matrix& b) { return f.solve(b); }

/// LU with partial pivoting for general square matrices (the softmax
/// extension needs determinants of non-symmetric matrices).
class LuFactor {
 public:
  explicit LuFactor(const Matrix& m) : n_(m.rows()), lu_(m), perm_(m.rows()) {
    require(m.rows() == m.cols(), "lu: square matrix required");
    std::iota(perm_.begin(), perm_.end(), std::size_t{0});
    perm_sign_ = 1;
    for (std::size_t k = 0; k < n_; ++k) {
      std::size_t piv = k;
      double best = std::abs(lu_(k, k));
      for (std::size_t i = k + 1; i < n_; ++i) {
        double v = std::abs(lu_(i, k));
        if (v > best) {
          best = v;
          piv = i;
        }
      }
      if (best == 0.0) throw NumericalError("lu: singular matrix");
      if (piv != k) {
        for (std::size_t j = 0; j < n_; ++j) std::swap(lu_(k, j), lu_(piv, j));
        std::swap(perm_[k], perm_[piv]);
        perm_sign_ = -perm_sign_;
      }
      for (std::size_t i = k + 1; i < n_; ++i) {
        double f = lu_(i, k) / lu_(k, k);
        lu_(i, k) = f;
        for (std::size_t j = k + 1; j < n_; ++j) lu_(i, j) -= f * lu_(k, j);
      }
    }
  }

  /// Sign of det(M): +1 or -1 (singular matrices throw at construction).
  int det_sign() const {
    int s = perm_sign_;
    for (std::size_t i = 0; i < n_; ++i)
      if (lu_(i, i) < 0.0) s = -s;
    return s;
  }

  double log_abs_det() const {
    double s = 0.0;
    for (std::size_t i = 0; i < n_; ++i) s += std::log(std::abs(lu_(i, i)));
    return s;
  }

  Vec solve(const Vec& b) const {
    require_same_dim(b.size(), n_, "lu solve");
    Vec y(n_);
    for (std::size_t i = 0; i < n_; ++i) y[i] = b[perm_[i]];
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t k = 0; k < i; ++k) y[i] -= lu_(i, k) * y[k];
    for (std::size_t ii = n_; ii-- > 0;) {
      for (std::size_t k = ii + 1; k < n_; ++k) y[ii] -= lu_(ii, k) * y[k];
      y[ii] /= lu_(ii, ii);
    }
    return y;
  }

 private:
  std::size_t n_;
  Matrix lu_;
  std::vector<std::size_t> perm_;
  int perm_sign_ = 1;
};

/// Haar-like random orthogonal matrix: QR of a standard-Gaussian matrix with
/// the R-diagonal sign correction. Deterministic given seed.
inline Matrix random_orthogonal(std::size_t n, std::uint64_t seed) {
  require(n >= 1, "random_orthogonal: n must be >= 1");
  Rng rng(seed);
  Matrix a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a(i, j) = rng.gaussian();

  // Householder QR, accumulating Q explicitly.
  Matrix q = Matrix::identity(n);
  Vec v(n);
  for (std::size_t k = 0; k < n; ++k) {
    double norm = 0.0;
    for (std::size_t i = k; i < n; ++i) norm += a(i, k) * a(i, k);
    norm = std::sqrt(norm);
    if (norm == 0.0) continue;
    double alpha = a(k, k) >= 0.0 ? -norm : norm;
    double vnorm2 = 0.0;
    for (std::size_t i = k; i < n; ++i) {
      v[i] = a(i, k) - (i == k ? alpha : 0.0);
      vnorm2 += v[i] * v[i];
    }
    if (vnorm2 == 0.0) continue;
    // apply H = I - 2 v v^T / |v|^2 to A (left) and accumulate into Q (right)
    for (std::size_t j = k; j < n; ++j) {
      double s = 0.0;
      for (std::size_t i = k; i < n; ++i) s += v[i] * a(i, j);
      s = 2.0 * s / vnorm2;
      for (std::size_t i = k; i < n; ++i) a(i, j) -= s * v[i];
    }
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (std::size_t j = k; j < n; ++j) s += q(i, j) * v[j];
      s = 2.0 * s / vnorm2;
      for (std::size_t j = k; j < n; ++j) q(i, j) -= s * v[j];
    }
  }
  // sign-fix columns so the distribution matches Haar rather than the QR
  // convention's bias
  for (std::size_t j = 0; j < n; ++j) {
    if (a(j, j) < 0.0)
      for (std::size_t i = 0; i < n; ++i) q(i, j) = -q(i, j);
  }
  return q;
}

/// Default finite-difference step per coordinate.
inline double fd_step(double xi) { return 1e-5 * (1.0 + std::abs(xi)); }

/// Central-difference gradient estimate, (f(x+h e_i) - f(x-h e_i)) / (2h).
/// step <= 0 selects the per-coordinate default.
inline Vec finite_diff_gradient(const std::function<double(const Vec&)>& f,
                                const Vec& x, double step = 0.0) {
  Vec g(x.size());
  Vec p(x);
  for (std::size_t i = 0; i < x.size(); ++i) {
    double h = step > 0.0 ? step : fd_step(x[i]);
    p[i] = x[i] + h;
    double fp = f(p);
    p[i] = x[i] - h;
    double fm = f(p);
    p[i] = x[i];
    g[i] = (fp - fm) / (2.0 * h);
  }
  return g;
}

/// Box-aware variant: refuses to step outside [lo, hi].
inline Vec finite_diff_gradient_boxed(const std::function<double(const Vec&)>& f,
                                      const Vec& x, const Vec& lo, const Vec& hi,
                                      double step = 0.0) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    double h = step > 0.0 ? step : fd_step(x[i]);
    if (x[i] + h > hi[i] || x[i] - h < lo[i])
      throw std::invalid_argument(
          "finite_diff_gradient: perturbed point leaves the domain at coordinate " +
          std::to_string(i));
  }
  return finite_diff_gradient(f, x, step);
}

/// Central-difference Hessian estimate from an analytic gradient:
/// column j is (grad(x+h e_j) - grad(x-h e_j)) / (2h).
inline Matrix central_diff_hessian(const std::function<Vec(const Vec&)>& grad,
                                   const Vec& x, double step = 0.0) {
  std::size_t n = x.size();
  Matrix h(n, n);
  Vec p(x);
  for (std::size_t j = 0; j < n; ++j) {
    double hj = step > 0.0 ? step : fd_step(x[j]);
    p[j] = x[j] + hj;
    Vec gp = grad(p);
    p[j] = x[j] - hj;
    Vec gm = grad(p);
    p[j] = x[j];
    for (std::size_t i = 0; i < n; ++i) h(i, j) = (gp[i] - gm[i]) / (2.0 * hj);
  }
  return h;
}

}  // namespace drsm
