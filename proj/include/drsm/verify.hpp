#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "drsm/algorithms.hpp"
#include "drsm/common.hpp"
#include "drsm/conic.hpp"
#include "drsm/constraints.hpp"
#include "drsm/numerics.hpp"
#include "drsm/objectives.hpp"

namespace drsm {

struct Violation {
  std::string location;
  double excess;
};

/// Outcome of one sampled property check. An inequality "lhs >= rhs - slack"
/// contributes excess = rhs - lhs, so pass() holds exactly when
/// max_excess <= tolerance.
struct CheckReport {
  std::string check;
  std::uint64_t seed = 0;
  double tolerance = 0.0;
  int checks_run = 0;
  int hypothesis_failures = 0;  // trials skipped because a precondition failed
  double max_excess = -std::numeric_limits<double>::infinity();
  std::vector<Violation> violations;

  bool pass() const { return max_excess <= tolerance; }

  void record(const std::string& location, double excess) {
    ++checks_run;
    max_excess = std::max(max_excess, excess);
    if (excess > tolerance) violations.push_back({location, excess});
  }

  void finish() {
    if (checks_run == 0) max_excess = 0.0;
  }
};

constexpr double kInequalitySlack = 1e-8;

/// Hessian sign test of DR-submodularity: every central-difference Hessian
/// entry at sampled interior points must be <= tol.
inline CheckReport check_dr_hessian(const Objective& obj, int samples, double tol,
                                    std::uint64_t seed) {
  require(samples >= 1, "check_dr_hessian: samples must be >= 1");
  CheckReport report;
  report.check = "dr-hessian";
  report.seed = seed;
  report.tolerance = tol;
  Rng rng(seed);
  auto grad_fn = [&](const Vec& x) { return obj.grad(x); };
  for (int s = 0; s < samples; ++s) {
    Vec x = sample_box_interior(obj, rng);
    Matrix hess = central_diff_hessian(grad_fn, x);
    for (std::size_t i = 0; i < obj.dim(); ++i)
      for (std::size_t j = 0; j < obj.dim(); ++j)
        report.record("sample " + std::to_string(s) + " entry (" + std::to_string(i) +
                          "," + std::to_string(j) + ")",
                      hess(i, j));
  }
  report.finish();
  return report;
}

/// Diminishing returns along coordinates: for a <= b and k > 0,
/// f(k e_i + a) - f(a) >= f(k e_i + b) - f(b).
inline CheckReport check_weak_dr(const Objective& obj, int samples, std::uint64_t seed) {
  require(samples >= 1, "check_weak_dr: samples must be >= 1");
  CheckReport report;
  report.check = "weak-dr";
  report.seed = seed;
  report.tolerance = 1e-9;
  Rng rng(seed);
  const Vec& lo = obj.box_lo();
  const Vec& hi = obj.box_hi();
  const std::size_t n = obj.dim();
  for (int s = 0; s < samples; ++s) {
    Vec b(n), a(n);
    for (std::size_t j = 0; j < n; ++j) {
      b[j] = rng.uniform(lo[j], hi[j]);
      a[j] = rng.uniform(lo[j], b[j]);
    }
    std::size_t i = std::size_t(rng.below(n));
    double room = hi[i] - b[i];
    if (room <= 1e-12) {
      ++report.hypothesis_failures;
      continue;
    }
    double k = rng.uniform(0.0, room);
    if (k <= 0.0) k = 0.5 * room;
    Vec ak = a, bk = b;
    ak[i] += k;
    bk[i] += k;
    double gain_small = obj.eval(ak) - obj.eval(a);
    double gain_large = obj.eval(bk) - obj.eval(b);
    report.record("sample " + std::to_string(s) + " coord " + std::to_string(i),
                  gain_large - gain_small);
  }
  report.finish();
  return report;
}

/// (y - x)^T grad f(x) >= f(x v y) + f(x ^ y) - 2 f(x) + (mu/2)||x - y||^2
/// for random x, y in the box.
inline CheckReport check_lemma1(const Objective& obj, double mu, int samples,
                                std::uint64_t seed) {
  require(mu >= 0.0, "check_lemma1: mu must be >= 0");
  require(samples >= 1, "check_lemma1: samples must be >= 1");
  CheckReport report;
  report.check = "lemma1";
  report.seed = seed;
  report.tolerance = kInequalitySlack;
  Rng rng(seed);
  const Vec& lo = obj.box_lo();
  const Vec& hi = obj.box_hi();
  for (int s = 0; s < samples; ++s) {
    Vec x(obj.dim()), y(obj.dim());
    for (std::size_t j = 0; j < obj.dim(); ++j) {
      x[j] = rng.uniform(lo[j], hi[j]);
      y[j] = rng.uniform(lo[j], hi[j]);
    }
    double lhs = dot(sub(y, x), obj.grad(x));
    Vec diff = sub(x, y);
    double rhs = obj.eval(cwise_max(x, y)) + obj.eval(cwise_min(x, y)) -
                 2.0 * obj.eval(x) + 0.5 * mu * dot(diff, diff);
    report.record("sample " + std::to_string(s), rhs - lhs);
  }
  report.finish();
  return report;
}

/// Key inequality behind the local-global relation: for random x in P and
/// z in shrink(P, x), with z* = x v x* - x,
///   f(x v x*) + f(x ^ x*) + f(z v z*) + f(z ^ z*) >= f(x*).
/// Requires f >= 0 at every evaluated point; trials where that hypothesis
/// fails are reported separately instead of asserted.
inline CheckReport check_key_claim(const Objective& obj, const DownClosedPolytope& p,
                                   const Vec& xstar, int trials, std::uint64_t seed) {
  require(trials >= 1, "check_key_claim: trials must be >= 1");
  if (!contains(p, xstar, kFeasTol))
    throw std::invalid_argument("check_key_claim: xstar is not feasible");
  CheckReport report;
  report.check = "key-claim";
  report.seed = seed;
  report.tolerance = kInequalitySlack;
  Rng rng(seed);
  for (int s = 0; s < trials; ++s) {
    Vec x = sample_feasible(p, rng);
    Vec z = sample_feasible(shrink(p, x), rng);
    Vec zstar = sub(cwise_max(x, xstar), x);
    double fxx = obj.eval(cwise_max(x, xstar));
    double fxn = obj.eval(cwise_min(x, xstar));
    double fzx = obj.eval(cwise_max(z, zstar));
    double fzn = obj.eval(cwise_min(z, zstar));
    double fstar = obj.eval(xstar);
    double least = std::min(std::min(fxx, fxn), std::min(std::min(fzx, fzn), fstar));
    if (least < -kInequalitySlack) {
      ++report.hypothesis_failures;  // nonnegativity hypothesis violated
      continue;
    }
    report.record("trial " + std::to_string(s), fstar - (fxx + fxn + fzx + fzn));
  }
  report.finish();
  return report;
}

/// With lambda' = min_i ubar_i / theta_i, every x in [0, theta] satisfies
/// f(x v x*) >= (1 - 1/lambda') f(x*). The proof stretches x v x* away from
/// x* by the factor lambda' and needs f >= 0 at that stretched point (and at
/// x*); samples where that hypothesis fails are reported, not asserted.
inline CheckReport check_lemma3(const Objective& obj, const Vec& theta, const Vec& xstar,
                                int samples, std::uint64_t seed) {
  require(samples >= 1, "check_lemma3: samples must be >= 1");
  require_same_dim(theta.size(), obj.dim(), "check_lemma3");
  require_same_dim(xstar.size(), obj.dim(), "check_lemma3");
  const Vec& ubar = obj.box_hi();
  double lambda = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < theta.size(); ++j) {
    require(theta[j] > 0.0 && theta[j] <= ubar[j] + kFeasTol,
            "check_lemma3: theta must lie in (0, ubar]");
    lambda = std::min(lambda, ubar[j] / theta[j]);
  }
  CheckReport report;
  report.check = "lemma3";
  report.seed = seed;
  report.tolerance = kInequalitySlack;
  Rng rng(seed);
  double floor_coef = 1.0 - 1.0 / lambda;
  double fstar = obj.eval(xstar);
  for (int s = 0; s < samples; ++s) {
    Vec x(obj.dim());
    for (std::size_t j = 0; j < obj.dim(); ++j) x[j] = rng.uniform(0.0, theta[j]);
    Vec up = cwise_max(x, xstar);
    // stretched point x* + lambda' (x v x* - x*), inside [0, ubar]
    Vec stretched(obj.dim());
    for (std::size_t j = 0; j < obj.dim(); ++j) {
      stretched[j] = xstar[j] + lambda * (up[j] - xstar[j]);
      stretched[j] = std::min(std::max(stretched[j], 0.0), ubar[j]);
    }
    if (fstar < -kInequalitySlack || obj.eval(stretched) < -kInequalitySlack) {
      ++report.hypothesis_failures;
      continue;
    }
    report.record("sample " + std::to_string(s), floor_coef * fstar - obj.eval(up));
  }
  report.finish();
  return report;
}

/// Growth bound along a non-monotone Frank-Wolfe trace:
/// x_i^(k) <= ubar_i [1 - (1-gamma)^{t^(k)/gamma}].
inline CheckReport check_growth_bound(const Trace& trace, const Vec& ubar, double gamma) {
  require(gamma > 0.0 && gamma <= 1.0, "check_growth_bound: gamma must be in (0, 1]");
  require(!trace.iterates.empty(), "check_growth_bound: empty trace");
  // shape checks: the trace must look like an Alg.-2 run from the origin
  require(norm_inf(trace.iterates.front()) == 0.0 && trace.ts.front() == 0.0,
          "check_growth_bound: trace does not start at the origin");
  require(trace.gammas.size() + 1 == trace.iterates.size(),
          "check_growth_bound: trace is not a uniform-step run");
  for (double gk : trace.gammas)
    require(gk <= gamma + 1e-15, "check_growth_bound: step size exceeds gamma");

  CheckReport report;
  report.check = "growth-bound";
  report.tolerance = 1e-9;
  for (std::size_t k = 0; k < trace.iterates.size(); ++k) {
    // pow(0, 0) == 1 keeps the gamma == 1 case right at t = 0
    double cap = 1.0 - std::pow(1.0 - gamma, trace.ts[k] / gamma);
    for (std::size_t i = 0; i < ubar.size(); ++i)
      report.record("k=" + std::to_string(k) + " i=" + std::to_string(i),
                    trace.iterates[k][i] - ubar[i] * cap);
  }
  report.finish();
  return report;
}

/// Heuristic strong-DR modulus for quadratics: min over sampled unit
/// directions v >= 0 of -v^T H v. A sampled lower-bound guess, not a
/// certificate; reports that use it should say so.
inline double heuristic_mu_quadratic(const QuadraticObjective& obj, int samples,
                                     std::uint64_t seed) {
  require(samples >= 1, "heuristic_mu_quadratic: samples must be >= 1");
  Rng rng(seed);
  double mu = std::numeric_limits<double>::infinity();
  Vec v(obj.dim());
  for (int s = 0; s < samples; ++s) {
    double norm = 0.0;
    for (double& vi : v) {
      vi = rng.uniform01();
      norm += vi * vi;
    }
    norm = std::sqrt(norm);
    if (norm == 0.0) continue;
    for (double& vi : v) vi /= norm;
    mu = std::min(mu, -dot(v, obj.quad_matrix().apply(v)));
  }
  return std::max(0.0, mu);
}

/// f(x + v) >= f(x) + <grad f(x), v> - (L/2)||v||^2 for v >= 0 or v <= 0
/// with x + v still in the box.
inline CheckReport check_quadratic_lower_bound(const Objective& obj, double lipschitz,
                                               int samples, std::uint64_t seed) {
  require(lipschitz >= 0.0, "check_quadratic_lower_bound: L must be >= 0");
  require(samples >= 1, "check_quadratic_lower_bound: samples must be >= 1");
  CheckReport report;
  report.check = "quadratic-lower-bound";
  report.seed = seed;
  report.tolerance = kInequalitySlack;
  Rng rng(seed);
  const Vec& lo = obj.box_lo();
  const Vec& hi = obj.box_hi();
  for (int s = 0; s < samples; ++s) {
    Vec x(obj.dim()), v(obj.dim());
    bool nonneg = rng.uniform01() < 0.5;
    for (std::size_t j = 0; j < obj.dim(); ++j) {
      x[j] = rng.uniform(lo[j], hi[j]);
      v[j] = nonneg ? rng.uniform(0.0, hi[j] - x[j]) : rng.uniform(lo[j] - x[j], 0.0);
    }
    double lhs = obj.eval(add(x, v));
    double rhs = obj.eval(x) + dot(obj.grad(x), v) - 0.5 * lipschitz * dot(v, v);
    report.record("sample " + std::to_string(s) + (nonneg ? " v>=0" : " v<=0"),
                  rhs - lhs);
  }
  report.finish();
  return report;
}

}  // namespace drsm
