#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "drsm/common.hpp"
#include "drsm/constraints.hpp"
#include "drsm/objectives.hpp"

namespace drsm {

/// Per-iteration record of a run. ts[k] is the cumulative step size; gs[k]
/// holds the non-stationarity where the algorithm computes one (NaN
/// otherwise). gammas has one entry fewer than iterates.
struct Trace {
  std::vector<Vec> iterates;
  std::vector<Vec> directions;
  Vec gammas;
  Vec ts;
  Vec values;
  Vec gs;

  std::size_t size() const { return iterates.size(); }
};

constexpr double kNoG = std::numeric_limits<double>::quiet_NaN();

/// g_Q(x) = max_{v in Q} <v - x, grad f(x)>. Zero exactly at constrained
/// stationary points; nonnegative for feasible x.
inline double nonstationarity(const Objective& obj, const DownClosedPolytope& q,
                              const Vec& x) {
  if (!contains(q, x, kFeasTol))
    throw std::invalid_argument("nonstationarity: point is not feasible");
  Vec g = obj.grad(x);
  Vec v = lmo(q, g);
  return dot(v, g) - dot(x, g);
}

struct FwResult {
  Vec x_best;
  double g_min = std::numeric_limits<double>::infinity();
  std::size_t best_k = 0;
  Trace trace;
};

/// Non-convex Frank-Wolfe: at each iterate take the LMO direction
/// d_k = v_k - x_k, record g_k = <d_k, grad f>, stop once g_k <= eps, and
/// return the iterate with the smallest g_k seen (not the last one).
/// Step size: exact line search where the objective has one (quadratics),
/// otherwise the classical 2/(k+2).
inline FwResult nonconvex_frank_wolfe(const Objective& obj, const DownClosedPolytope& q,
                                      int max_iters, double eps, Vec x0) {
  require(max_iters >= 1, "nonconvex_frank_wolfe: need at least one iteration");
  if (!contains(q, x0, kFeasTol))
    throw std::invalid_argument("nonconvex_frank_wolfe: infeasible start point");

  FwResult result;
  Trace& trace = result.trace;
  Vec x = std::move(x0);
  double t = 0.0;

  for (int k = 0; k <= max_iters; ++k) {
    Vec g = obj.grad(x);
    Vec v = lmo(q, g);
    Vec d = sub(v, x);
    double gk = dot(d, g);

    trace.iterates.push_back(x);
    trace.directions.push_back(v);
    trace.ts.push_back(t);
    trace.values.push_back(obj.eval(x));
    trace.gs.push_back(gk);

    if (gk < result.g_min) {
      result.g_min = gk;
      result.best_k = std::size_t(k);
      result.x_best = x;
    }
    if (gk <= eps) break;
    if (k == max_iters) break;

    double gamma;
    if (auto exact = obj.exact_linesearch(x, d)) {
      gamma = *exact;
    } else {
      gamma = 2.0 / (double(k) + 2.0);
    }
    trace.gammas.push_back(gamma);
    axpy(x, gamma, d);
    t += gamma;
  }
  return result;
}

/// Inputs of the two-phase algorithm; x0/z0 default to the origin.
struct TwoPhaseConfig {
  int k1 = 100;
  int k2 = 100;
  double eps1 = 1e-6;
  double eps2 = 1e-6;
  std::optional<Vec> x0;
  std::optional<Vec> z0;

  void validate() const {
    require(k1 >= 1 && k2 >= 1, "two_phase: iteration budgets must be >= 1");
    require(eps1 >= 0.0 && eps2 >= 0.0, "two_phase: tolerances must be >= 0");
  }
};

struct TwoPhaseResult {
  Vec x, z;
  double fx = 0.0, fz = 0.0;
  double gx = 0.0, gz = 0.0;  // non-stationarities of x in P and z in Q
  bool winner_is_x = true;
  Trace trace_p, trace_q;

  const Vec& winner() const { return winner_is_x ? x : z; }
  double winner_value() const { return winner_is_x ? fx : fz; }
};

/// Two-phase Frank-Wolfe: find an approximately stationary x in P, shrink to
/// Q = P intersect {y <= ubar - x}, find an approximately stationary z in Q,
/// return the better of the two (ties go to x).
inline TwoPhaseResult two_phase_fw(const Objective& obj, const DownClosedPolytope& p,
                                   const TwoPhaseConfig& cfg) {
  cfg.validate();
  Vec x0 = cfg.x0.value_or(zeros(p.dim()));

  TwoPhaseResult out;
  FwResult phase1 = nonconvex_frank_wolfe(obj, p, cfg.k1, cfg.eps1, std::move(x0));
  out.x = phase1.x_best;
  out.gx = phase1.g_min;
  out.trace_p = std::move(phase1.trace);

  DownClosedPolytope q = shrink(p, out.x);
  Vec z0 = cfg.z0.value_or(zeros(p.dim()));
  z0 = clamp(z0, zeros(p.dim()), q.ubar());  // clip into the shrunken box
  FwResult phase2 = nonconvex_frank_wolfe(obj, q, cfg.k2, cfg.eps2, std::move(z0));
  out.z = phase2.x_best;
  out.gz = phase2.g_min;
  out.trace_q = std::move(phase2.trace);

  out.fx = obj.eval(out.x);
  out.fz = obj.eval(out.z);
  out.winner_is_x = out.fx >= out.fz;
  return out;
}

struct NonmonotoneFwResult {
  Vec x;
  Trace trace;
};

/// Non-monotone Frank-Wolfe variant: start at 0, move by gamma along the
/// shrunken LMO direction until the cumulative step size reaches exactly 1.
/// The last step is clipped to 1 - t, so the output is a convex combination
/// of LMO vertices and hence feasible.
inline NonmonotoneFwResult nonmonotone_fw(const Objective& obj,
                                          const DownClosedPolytope& p, double gamma) {
  require(gamma > 0.0 && gamma <= 1.0, "nonmonotone_fw: gamma must be in (0, 1]");

  NonmonotoneFwResult out;
  Trace& trace = out.trace;
  Vec x = zeros(p.dim());
  double t = 0.0;

  trace.iterates.push_back(x);
  trace.ts.push_back(t);
  trace.values.push_back(obj.eval(x));
  trace.gs.push_back(kNoG);

  while (t < 1.0) {
    Vec g = obj.grad(x);
    Vec v = shrunken_lmo(p, x, g);
    double gk = std::min(gamma, 1.0 - t);  // exact: t + (1 - t) == 1
    axpy(x, gk, v);
    t += gk;

    trace.directions.push_back(std::move(v));
    trace.gammas.push_back(gk);
    trace.iterates.push_back(x);
    trace.ts.push_back(t);
    trace.values.push_back(obj.eval(x));
    trace.gs.push_back(kNoG);
  }
  out.x = std::move(x);
  return out;
}

struct ProjGradResult {
  Vec x;
  Trace trace;
};

/// Projected gradient ascent with diminishing step sizes 1/(k+1), k from 0.
/// Each iterate is projected back onto P with Dykstra.
inline ProjGradResult projected_gradient_ascent(const Objective& obj,
                                                const DownClosedPolytope& p,
                                                int iterations, double proj_tol = 1e-8,
                                                int proj_max_sweeps = 10000) {
  require(iterations >= 1, "projected_gradient_ascent: iterations must be >= 1");

  ProjGradResult out;
  Trace& trace = out.trace;
  Vec x = zeros(p.dim());
  trace.iterates.push_back(x);
  trace.ts.push_back(0.0);
  trace.values.push_back(obj.eval(x));
  trace.gs.push_back(kNoG);

  for (int k = 0; k < iterations; ++k) {
    double step = 1.0 / (double(k) + 1.0);
    Vec y = x;
    axpy(y, step, obj.grad(x));
    x = project(p, y, proj_tol, proj_max_sweeps);

    trace.gammas.push_back(step);
    trace.iterates.push_back(x);
    trace.ts.push_back(trace.ts.back() + step);
    trace.values.push_back(obj.eval(x));
    trace.gs.push_back(kNoG);
  }
  out.x = std::move(x);
  return out;
}

}  // namespace drsm
