#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace drsm {

using Vec = std::vector<double>;

// Numerical breakdown: factorization failure, non-convergence, LP trouble.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// LP has no feasible point.
struct InfeasibleError : NumericalError {
  using NumericalError::NumericalError;
};

// Malformed or wrong-version serialized data.
struct SchemaError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline void require(bool cond, const std::string& what) {
  if (!cond) throw std::invalid_argument(what);
}

inline void require_same_dim(std::size_t a, std::size_t b, const char* where) {
  if (a != b)
    throw std::invalid_argument(std::string(where) + ": dimension mismatch (" +
                                std::to_string(a) + " vs " + std::to_string(b) + ")");
}

inline double dot(const Vec& a, const Vec& b) {
  require_same_dim(a.size(), b.size(), "dot");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm2(const Vec& a) { return std::sqrt(dot(a, a)); }

inline double norm_inf(const Vec& a) {
  double s = 0.0;
  for (double v : a) s = std::max(s, std::abs(v));
  return s;
}

inline Vec add(const Vec& a, const Vec& b) {
  require_same_dim(a.size(), b.size(), "add");
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

inline Vec sub(const Vec& a, const Vec& b) {
  require_same_dim(a.size(), b.size(), "sub");
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

inline Vec scale(const Vec& a, double s) {
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = s * a[i];
  return r;
}

// r += s * a
inline void axpy(Vec& r, double s, const Vec& a) {
  require_same_dim(r.size(), a.size(), "axpy");
  for (std::size_t i = 0; i < a.size(); ++i) r[i] += s * a[i];
}

inline Vec cwise_max(const Vec& a, const Vec& b) {
  require_same_dim(a.size(), b.size(), "cwise_max");
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = std::max(a[i], b[i]);
  return r;
}

inline Vec cwise_min(const Vec& a, const Vec& b) {
  require_same_dim(a.size(), b.size(), "cwise_min");
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = std::min(a[i], b[i]);
  return r;
}

inline Vec clamp(const Vec& x, const Vec& lo, const Vec& hi) {
  Vec r(x.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    r[i] = std::min(std::max(x[i], lo[i]), hi[i]);
  return r;
}

inline Vec zeros(std::size_t n) { return Vec(n, 0.0); }
inline Vec ones(std::size_t n) { return Vec(n, 1.0); }
inline Vec constant(std::size_t n, double v) { return Vec(n, v); }

}  // namespace drsm
