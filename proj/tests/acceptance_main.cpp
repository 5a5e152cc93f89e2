// Acceptance suite: end-to-end checks of the solver guarantees, gradient
// correctness, DR certification, conic reduction, LP oracle equivalence and
// reproducibility. Prints one pass/fail line per criterion; exit code is the
// number of failed criteria.
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "drsm/algorithms.hpp"
#include "drsm/cli.hpp"
#include "drsm/conic.hpp"
#include "drsm/instances.hpp"
#include "drsm/serialize.hpp"
#include "drsm/verify.hpp"
#include "support/oracles.hpp"

using namespace drsm;

namespace {

struct Suite {
  int failures = 0;

  void report(int id, const std::string& name, bool pass, const std::string& detail) {
    std::printf("[%s] criterion %2d: %-34s %s\n", pass ? "PASS" : "FAIL", id, name.c_str(),
                detail.c_str());
    if (!pass) ++failures;
  }
};

struct DeskInstance {
  Instance instance;
  OracleResult oracle;
};

// 20 uniform (n=5, m=2) + 20 exponential (n=5, m=5) desk instances with
// grid+polish oracles (21 points per axis, 20 restarts)
std::vector<DeskInstance> build_desk_set() {
  std::vector<DeskInstance> desk;
  desk.reserve(40);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Instance inst = gen_quadratic_uniform(5, 2, seed);
    OracleResult oracle =
        brute_force_opt(*inst.objective, inst.polytope, 21, 20, seed + 10007);
    desk.push_back({std::move(inst), std::move(oracle)});
  }
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Instance inst = gen_quadratic_exponential(5, 5, seed);
    OracleResult oracle =
        brute_force_opt(*inst.objective, inst.polytope, 21, 20, seed + 20011);
    desk.push_back({std::move(inst), std::move(oracle)});
  }
  return desk;
}

std::shared_ptr<LogisticObjective> acceptance_logistic() {
  Rng rng(424242);
  const std::size_t m = 30, n = 6;
  std::vector<int> signs{1, -1, 1, 1, -1, -1};
  Matrix data(m, n);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) data(i, j) = signs[j] * rng.uniform(0.02, 1.0);
  Vec labels(m);
  for (auto& y : labels) y = rng.uniform01() < 0.5 ? -1.0 : 1.0;
  Vec ybox(n);
  for (std::size_t j = 0; j < n; ++j) ybox[j] = signs[j] * 1.0;
  return std::make_shared<LogisticObjective>(data, labels, 0.1,
                                             RegularizerKind::SmoothRational, 2.0, ybox);
}

double max_rel_grad_error(const Objective& obj, int samples, std::uint64_t seed) {
  Rng rng(seed);
  double worst = 0.0;
  for (int s = 0; s < samples; ++s) {
    Vec x = sample_box_interior(obj, rng);
    Vec analytic = obj.grad(x);
    Vec fd = finite_diff_gradient([&](const Vec& p) { return obj.eval(p); }, x);
    worst = std::max(worst, norm2(sub(fd, analytic)) / std::max(1.0, norm2(analytic)));
  }
  return worst;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

}  // namespace

int main() {
  Suite suite;
  std::vector<DeskInstance> desk = build_desk_set();

  // 1. nonmonotone Frank-Wolfe clears the 1/e floor on every desk instance
  {
    int ok = 0;
    double worst_ratio = std::numeric_limits<double>::infinity();
    std::vector<Trace> traces;
    for (const DeskInstance& d : desk) {
      auto run = nonmonotone_fw(*d.instance.objective, d.instance.polytope, 0.01);
      double ratio = d.instance.objective->eval(run.x) / d.oracle.value;
      worst_ratio = std::min(worst_ratio, ratio);
      if (ratio >= std::exp(-1.0)) ++ok;
      traces.push_back(std::move(run.trace));
    }
    suite.report(1, "1/e floor vs oracle", ok == int(desk.size()),
                 std::to_string(ok) + "/" + std::to_string(desk.size()) +
                     " (worst ratio " + fmt(worst_ratio) + ", 1/e = " +
                     fmt(std::exp(-1.0)) + ")");

    // 3. growth bound along every trace from criterion 1
    int growth_violations = 0;
    for (std::size_t i = 0; i < traces.size(); ++i) {
      auto rep = check_growth_bound(traces[i], desk[i].instance.polytope.ubar(), 0.01);
      growth_violations += int(rep.violations.size());
    }
    suite.report(3, "growth bound on all traces", growth_violations == 0,
                 std::to_string(growth_violations) + " violations");

    // 4. step-size ledger and final feasibility
    bool ledger_ok = true;
    for (std::size_t i = 0; i < traces.size(); ++i) {
      double total = 0.0;
      for (double g : traces[i].gammas) total += g;
      if (total != 1.0) ledger_ok = false;
      if (!contains(desk[i].instance.polytope, traces[i].iterates.back(), 1e-9))
        ledger_ok = false;
    }
    suite.report(4, "step sizes sum to 1, feasible end", ledger_ok,
                 ledger_ok ? "exact on all runs" : "violated");
  }

  // 2. local-global inequality for the two-phase algorithm
  {
    int ok = 0;
    double worst_slack = std::numeric_limits<double>::infinity();
    for (const DeskInstance& d : desk) {
      auto res = two_phase_fw(*d.instance.objective, d.instance.polytope, TwoPhaseConfig{});
      double floor = 0.25 * (d.oracle.value - res.gx - res.gz) - 1e-8;
      double slack = res.winner_value() - floor;
      worst_slack = std::min(worst_slack, slack);
      if (slack >= 0.0) ++ok;
    }
    suite.report(2, "local-global 1/4 bound", ok == int(desk.size()),
                 std::to_string(ok) + "/" + std::to_string(desk.size()) +
                     " (worst slack " + fmt(worst_slack) + ")");
  }

  // 5. analytic gradients match central differences at 1e-5 relative
  {
    double worst = 0.0;
    worst = std::max(worst, max_rel_grad_error(*desk[0].instance.objective, 50, 1));
    Instance softmax = gen_softmax(8, 4, 3);
    worst = std::max(worst, max_rel_grad_error(*softmax.objective, 50, 2));
    Rng table_rng(17);
    Vec table(16);
    for (auto& v : table) v = table_rng.uniform(-1.0, 1.0);
    MeanFieldKLObjective meanfield(4, table);
    worst = std::max(worst, max_rel_grad_error(meanfield, 50, 3));
    worst = std::max(worst, max_rel_grad_error(*acceptance_logistic(), 50, 4));
    suite.report(5, "gradients vs finite differences", worst <= 1e-5,
                 "max relative error " + fmt(worst));
  }

  // 6. DR certification: generated instances pass, a planted violation fails
  {
    bool all_pass = true;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      all_pass &= check_dr_hessian(*gen_quadratic_uniform(5, 2, seed).objective, 50,
                                   1e-6, seed).pass();
      all_pass &= check_dr_hessian(*gen_quadratic_exponential(5, 5, seed).objective, 50,
                                   1e-6, seed).pass();
    }
    for (std::uint64_t seed = 0; seed < 3; ++seed)
      all_pass &= check_dr_hessian(*gen_softmax(6, 3, seed).objective, 50, 1e-6, seed)
                      .pass();

    Matrix h(3, 3, -0.3);
    h(0, 1) = h(1, 0) = 0.2;  // planted positive off-diagonal entry
    QuadraticObjective planted(h, zeros(3), 0.0, ones(3), /*require_dr=*/false);
    bool planted_fails = !check_dr_hessian(planted, 50, 1e-6, 0).pass();
    suite.report(6, "DR hessian certification", all_pass && planted_fails,
                 std::string("generated pass: ") + (all_pass ? "yes" : "NO") +
                     ", planted fails: " + (planted_fails ? "yes" : "NO"));
  }

  // 7. key claim holds on 100/100 trials for 10 desk instances
  {
    int instances_ok = 0;
    for (std::size_t i = 0; i < 40; i += 4) {
      const DeskInstance& d = desk[i];
      auto rep = check_key_claim(*d.instance.objective, d.instance.polytope, d.oracle.x,
                                 100, 31 + i);
      if (rep.pass() && rep.checks_run == 100 && rep.violations.empty()) ++instances_ok;
    }
    suite.report(7, "key claim, 100 trials each", instances_ok == 10,
                 std::to_string(instances_ok) + "/10 instances");
  }

  // 8. LP solutions match exhaustive vertex enumeration
  {
    Rng rng(808);
    int ok = 0;
    const int total = 200;
    for (int trial = 0; trial < total; ++trial) {
      std::size_t n = 2 + rng.below(4);  // 2..5
      std::size_t m = 1 + rng.below(5);  // 1..5
      LinearProgram lp;
      lp.c.resize(n);
      for (auto& v : lp.c) v = rng.uniform(-2.0, 2.0);
      lp.G = Matrix(m, n);
      for (auto& v : lp.G.data()) v = rng.uniform(0.01, 1.01);
      lp.g.assign(m, rng.uniform(0.5, 2.0));
      lp.lo = zeros(n);
      lp.hi = Vec(n, rng.uniform(0.5, 2.0));
      auto mine = maximize_linear(lp);
      auto oracle = oracles::enumerate_lp_max(lp.c, lp.G, lp.g, lp.lo, lp.hi);
      if (oracle.feasible && std::abs(mine.value - oracle.value) <= 1e-8) ++ok;
    }
    suite.report(8, "LP vs vertex enumeration", ok == total,
                 std::to_string(ok) + "/" + std::to_string(total));
  }

  // 9. conic reduction: pointwise equality and clean off-diagonal report
  {
    auto logistic = acceptance_logistic();
    SignVector alpha = infer_sign_vector(logistic->data());
    auto negated = std::make_shared<NegatedObjective>(logistic);
    Matrix m_rows(1, logistic->dim());
    for (std::size_t j = 0; j < logistic->dim(); ++j) m_rows(0, j) = alpha.at(j) * 0.5;
    auto reduced = flip_reduce(negated, alpha, m_rows, {2.0}, logistic->ybox());

    Rng rng(55);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
      Vec x(logistic->dim());
      for (std::size_t j = 0; j < x.size(); ++j)
        x[j] = rng.uniform(0.0, reduced.objective->box_hi()[j]);
      Vec y(x.size());
      for (std::size_t j = 0; j < x.size(); ++j) y[j] = alpha.at(j) * x[j];
      worst = std::max(worst, std::abs(reduced.objective->eval(x) - negated->eval(y)));
    }
    auto kalpha = verify_kalpha(*negated, alpha, 50, 1e-6, 66);
    suite.report(9, "conic reduction soundness",
                 worst <= 1e-12 && kalpha.offdiag_violations == 0,
                 "max |f - g| = " + fmt(worst) + ", offdiag violations = " +
                     std::to_string(kalpha.offdiag_violations));
  }

  // 10. quadratic lower bound with L = ||H||_F
  {
    int ok = 0;
    for (const DeskInstance& d : desk) {
      const auto& q = dynamic_cast<const QuadraticObjective&>(*d.instance.objective);
      auto rep = check_quadratic_lower_bound(*d.instance.objective,
                                             q.quad_matrix().frobenius_norm(), 200, 71);
      if (rep.pass()) ++ok;
    }
    suite.report(10, "quadratic lower bound", ok == int(desk.size()),
                 std::to_string(ok) + "/" + std::to_string(desk.size()));
  }

  // 11. experiment CSV is byte-identical across reruns (serial and pooled)
  {
    cli::ExperimentConfig cfg;
    cfg.kind = "quad-uniform";
    cfg.n_list = {4, 5};
    cfg.m_rule = "half";
    cfg.repeats = 3;
    cfg.seed = 12345;
    cfg.grid_points = 11;
    cfg.polish_restarts = 5;
    std::ostringstream first, second, log;
    cfg.jobs = 1;
    cli::cmd_experiment(cfg, first, log);
    cfg.jobs = 3;
    cli::cmd_experiment(cfg, second, log);
    suite.report(11, "experiment reproducibility", first.str() == second.str(),
                 first.str() == second.str() ? "byte-identical" : "outputs differ");
  }

  std::printf("%d/11 criteria passed\n", 11 - suite.failures);
  return suite.failures;
}
