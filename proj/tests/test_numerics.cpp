#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "drsm/numerics.hpp"
#include "drsm/rng.hpp"
#include "support/oracles.hpp"

using namespace drsm;
using Catch::Approx;

namespace {

Matrix random_spd(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  Matrix b(n, n);
  for (auto& v : b.data()) v = rng.uniform(-1.0, 1.0);
  Matrix m = b.multiply(b.transpose());
  for (std::size_t i = 0; i < n; ++i) m(i, i) += 0.5;
  return m;
}

}  // namespace

TEST_CASE("cholesky logdet on identity and diagonals") {
  CHECK(factor_logdet(Matrix::identity(3)).logdet() == Approx(0.0).margin(1e-15));

  Matrix d(2, 2);
  d(0, 0) = 2.0;
  d(1, 1) = 3.0;
  CHECK(factor_logdet(d).logdet() == Approx(std::log(6.0)).epsilon(1e-12));
}

TEST_CASE("cholesky logdet matches cofactor expansion on random SPD") {
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    Matrix m = random_spd(3, seed);
    double expected = std::log(oracles::det3_cofactor(m));
    CHECK(factor_logdet(m).logdet() == Approx(expected).margin(1e-10));
  }
}

TEST_CASE("cholesky rejects bad input") {
  Matrix asym(2, 2);
  asym(0, 1) = 1.0;
  asym(1, 0) = 2.0;
  asym(0, 0) = asym(1, 1) = 3.0;
  CHECK_THROWS_AS(factor_logdet(asym), std::invalid_argument);

  Matrix indef = Matrix::identity(2);
  indef(1, 1) = -1.0;
  CHECK_THROWS_AS(factor_logdet(indef), NumericalError);
}

TEST_CASE("cholesky solves") {
  Vec b{1.0, -2.0, 0.5};
  CHECK(solve_with_factor(factor_logdet(Matrix::identity(3)), b) == b);

  Matrix d(2, 2);
  d(0, 0) = 2.0;
  d(1, 1) = 4.0;
  Matrix x = solve_with_factor(factor_logdet(d), Matrix::identity(2));
  CHECK(x(0, 0) == Approx(0.5));
  CHECK(x(1, 1) == Approx(0.25));
  CHECK(x(0, 1) == 0.0);

  Matrix m = random_spd(4, 42);
  Rng rng(7);
  Matrix rhs(4, 3);
  for (auto& v : rhs.data()) v = rng.uniform(-2.0, 2.0);
  Matrix sol = solve_with_factor(factor_logdet(m), rhs);
  Matrix residual = m.multiply(sol);
  double worst = 0.0, bnorm = 0.0;
  for (std::size_t i = 0; i < rhs.rows(); ++i)
    for (std::size_t j = 0; j < rhs.cols(); ++j) {
      worst = std::max(worst, std::abs(residual(i, j) - rhs(i, j)));
      bnorm = std::max(bnorm, std::abs(rhs(i, j)));
    }
  CHECK(worst <= 1e-9 * (1.0 + bnorm));
}

TEST_CASE("logdet scaling identity") {
  // logdet(c M) = n log c + logdet(M)
  Rng rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    Matrix m = random_spd(4, rng.next_u64());
    double c = rng.uniform(0.1, 5.0);
    Matrix cm = m;
    for (auto& v : cm.data()) v *= c;
    CHECK(factor_logdet(cm).logdet() ==
          Approx(4.0 * std::log(c) + factor_logdet(m).logdet()).margin(1e-9));
  }
}

TEST_CASE("lu factorization") {
  Matrix m(2, 2);
  m(0, 0) = 0.0;
  m(0, 1) = 1.0;
  m(1, 0) = -2.0;
  m(1, 1) = 3.0;  // det = 2
  LuFactor lu(m);
  CHECK(lu.det_sign() == 1);
  CHECK(lu.log_abs_det() == Approx(std::log(2.0)));
  Vec x = lu.solve({1.0, 0.0});  // [0 1; -2 3] x = [1, 0] -> x = [1.5, 1]
  CHECK(x[0] == Approx(1.5));
  CHECK(x[1] == Approx(1.0));

  CHECK_THROWS_AS(LuFactor(Matrix(2, 2, 0.0)), NumericalError);
}

TEST_CASE("random orthogonal basics") {
  Matrix u1 = random_orthogonal(1, 5);
  CHECK(std::abs(std::abs(u1(0, 0)) - 1.0) <= 1e-12);

  Matrix u = random_orthogonal(3, 123);
  Matrix gram = u.transpose().multiply(u);
  double worst = 0.0;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      worst = std::max(worst, std::abs(gram(i, j) - (i == j ? 1.0 : 0.0)));
  CHECK(worst <= 1e-10);

  Matrix again = random_orthogonal(3, 123);
  CHECK(u.data() == again.data());

  CHECK_THROWS_AS(random_orthogonal(0, 1), std::invalid_argument);
}

TEST_CASE("random orthogonal preserves norms") {
  Rng rng(9);
  Matrix u = random_orthogonal(6, 77);
  for (int trial = 0; trial < 20; ++trial) {
    Vec x(6);
    for (auto& v : x) v = rng.uniform(-3.0, 3.0);
    CHECK(norm2(u.apply(x)) == Approx(norm2(x)).margin(1e-10));
  }
}

TEST_CASE("finite difference gradient") {
  Vec c{0.5, -1.5, 2.0};
  auto linear = [&](const Vec& x) { return dot(c, x); };
  Vec g = finite_diff_gradient(linear, Vec{0.3, 0.7, -0.2});
  for (std::size_t i = 0; i < 3; ++i) CHECK(g[i] == Approx(c[i]).margin(1e-9));

  auto half_norm = [](const Vec& x) { return 0.5 * dot(x, x); };
  Vec g2 = finite_diff_gradient(half_norm, Vec{1.0, 2.0});
  CHECK(g2[0] == Approx(1.0).margin(1e-9));
  CHECK(g2[1] == Approx(2.0).margin(1e-9));
}

TEST_CASE("finite difference accuracy is step-insensitive on quadratics") {
  Rng rng(3);
  Matrix h = random_spd(3, 31);
  for (auto& v : h.data()) v = -v;
  Vec lin{0.2, -0.4, 1.0};
  auto f = [&](const Vec& x) { return 0.5 * dot(x, h.apply(x)) + dot(lin, x); };
  Vec x{0.4, 0.1, 0.8};
  Vec analytic = h.apply(x);
  axpy(analytic, 1.0, lin);
  for (double step : {1e-6, 1e-5, 1e-4, 1e-3}) {
    Vec fd = finite_diff_gradient(f, x, step);
    CHECK(norm_inf(sub(fd, analytic)) <= 1e-7);
  }
}

TEST_CASE("boxed finite differences reject boundary points") {
  auto f = [](const Vec& x) { return x[0]; };
  Vec lo{0.0}, hi{1.0};
  CHECK_THROWS_AS(finite_diff_gradient_boxed(f, Vec{0.0}, lo, hi), std::invalid_argument);
  CHECK_NOTHROW(finite_diff_gradient_boxed(f, Vec{0.5}, lo, hi));
}

TEST_CASE("central difference hessian recovers a quadratic's matrix") {
  Matrix h = random_spd(3, 17);
  for (auto& v : h.data()) v = -v;
  auto grad = [&](const Vec& x) { return h.apply(x); };
  Matrix est = central_diff_hessian(grad, Vec{0.3, 0.6, 0.2});
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      CHECK(est(i, j) == Approx(h(i, j)).margin(1e-8));
}
