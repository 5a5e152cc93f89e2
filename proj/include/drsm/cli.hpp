#pragma once

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <fstream>
#include <functional>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "drsm/algorithms.hpp"
#include "drsm/common.hpp"
#include "drsm/conic.hpp"
#include "drsm/instances.hpp"
#include "drsm/serialize.hpp"
#include "drsm/verify.hpp"

namespace drsm::cli {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailure = 1;
constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;

/// One solver run on one instance, materialized for CSV/JSON output.
/// ratio is present exactly when an oracle value is.
struct RunRecord {
  std::string instance_id;
  std::string algorithm;
  std::string params;
  double final_value = 0.0;
  std::optional<double> oracle_value;
  std::optional<double> ratio;
  double wall_seconds = 0.0;
  std::size_t iterations = 0;
  std::uint64_t seed = 0;
};

inline json run_record_to_json(const RunRecord& r) {
  json j{{"instance", r.instance_id}, {"algorithm", r.algorithm},
         {"params", r.params},        {"final_value", r.final_value},
         {"wall_seconds", r.wall_seconds}, {"iterations", r.iterations},
         {"seed", r.seed}};
  if (r.oracle_value) {
    j["oracle_value"] = *r.oracle_value;
    j["ratio"] = *r.ratio;
  }
  return j;
}

inline void attach_oracle(RunRecord& r, double oracle_value) {
  r.oracle_value = oracle_value;
  r.ratio = oracle_value > 0.0 ? r.final_value / oracle_value
                               : std::numeric_limits<double>::quiet_NaN();
}

/// Objective actually optimized/checked for an instance: logistic losses are
/// minimization problems over a conic lattice, so they enter the pipeline as
/// the negated loss flipped into the positive orthant.
inline std::shared_ptr<const Objective> maximization_view(const Instance& inst) {
  if (auto logistic = std::dynamic_pointer_cast<const LogisticObjective>(inst.objective)) {
    SignVector alpha = infer_sign_vector(logistic->data());
    auto negated = std::make_shared<NegatedObjective>(logistic);
    return std::make_shared<FlippedObjective>(negated, alpha);
  }
  return inst.objective;
}

inline Instance generate_instance(const std::string& kind, std::size_t n, std::size_t m,
                                  std::uint64_t seed) {
  if (kind == "quad-uniform") return gen_quadratic_uniform(n, m, seed);
  if (kind == "quad-exp") return gen_quadratic_exponential(n, m, seed);
  if (kind == "softmax") return gen_softmax(n, m, seed);
  throw std::invalid_argument("unknown instance kind \"" + kind +
                              "\" (expected quad-uniform, quad-exp or softmax)");
}

inline void cmd_generate(const std::string& kind, std::size_t n, std::size_t m,
                         std::uint64_t seed, const std::string& out_path,
                         std::ostream& log) {
  Instance inst = generate_instance(kind, n, m, seed);
  save_instance(inst, out_path);
  log << "wrote " << inst.id() << " to " << out_path << " (n=" << n << " m=" << m
      << " |ubar|=" << format_double(norm2(inst.polytope.ubar()))
      << " max ubar=" << format_double(norm_inf(inst.polytope.ubar())) << ")\n";
}

struct SolveParams {
  std::string algorithm;         // two-phase-fw | nonmonotone-fw | proj-grad
  double gamma = 0.01;           // nonmonotone-fw step size
  int iterations = 100;          // proj-grad budget; two-phase K1 = K2
  double eps = 1e-6;             // two-phase stopping tolerances
  bool with_oracle = false;
  int grid_points = 21;
  int polish_restarts = 20;

  std::string describe() const {
    std::ostringstream os;
    if (algorithm == "nonmonotone-fw") {
      os << "gamma=" << format_double(gamma);
    } else if (algorithm == "two-phase-fw") {
      os << "K1=K2=" << iterations << " eps=" << format_double(eps);
    } else {
      os << "iterations=" << iterations;
    }
    return os.str();
  }
};

/// Run one algorithm on a loaded instance. Writes the trace CSV when
/// out_csv is nonempty (two traces for the two-phase algorithm) and the full
/// iterate dump when trace_json is nonempty.
inline RunRecord cmd_solve(const Instance& inst, const SolveParams& params,
                           const std::string& out_csv, const std::string& trace_json,
                           std::uint64_t seed) {
  auto view = maximization_view(inst);
  RunRecord record;
  record.instance_id = inst.id();
  record.algorithm = params.algorithm;
  record.params = params.describe();
  record.seed = seed;

  auto t0 = std::chrono::steady_clock::now();
  std::vector<std::pair<std::string, const Trace*>> traces;
  Trace trace_a, trace_b;
  std::string winner_tag;

  if (params.algorithm == "nonmonotone-fw") {
    auto result = nonmonotone_fw(*view, inst.polytope, params.gamma);
    trace_a = std::move(result.trace);
    record.final_value = trace_a.values.back();
    record.iterations = trace_a.gammas.size();
    traces.push_back({"nonmonotone-fw", &trace_a});
  } else if (params.algorithm == "two-phase-fw") {
    TwoPhaseConfig cfg;
    cfg.k1 = cfg.k2 = params.iterations;
    cfg.eps1 = cfg.eps2 = params.eps;
    auto result = two_phase_fw(*view, inst.polytope, cfg);
    trace_a = std::move(result.trace_p);
    trace_b = std::move(result.trace_q);
    record.final_value = result.winner_value();
    record.iterations = trace_a.gammas.size() + trace_b.gammas.size();
    winner_tag = result.winner_is_x ? "x (phase 1)" : "z (phase 2)";
    traces.push_back({"phase 1 (P)", &trace_a});
    traces.push_back({"phase 2 (Q)", &trace_b});
  } else if (params.algorithm == "proj-grad") {
    auto result = projected_gradient_ascent(*view, inst.polytope, params.iterations);
    trace_a = std::move(result.trace);
    record.final_value = trace_a.values.back();
    record.iterations = trace_a.gammas.size();
    traces.push_back({"proj-grad", &trace_a});
  } else {
    throw std::invalid_argument("unknown algorithm \"" + params.algorithm +
                                "\" (expected two-phase-fw, nonmonotone-fw or proj-grad)");
  }
  record.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  if (params.with_oracle) {
    OracleResult oracle = brute_force_opt(*view, inst.polytope, params.grid_points,
                                          params.polish_restarts, Rng(seed).fork(77).next_u64());
    attach_oracle(record, oracle.value);
  }

  if (!out_csv.empty()) {
    std::ofstream out(out_csv, std::ios::binary);
    if (!out) throw std::runtime_error("cmd_solve: cannot open " + out_csv);
    out << "# drsubmax solve instance=" << record.instance_id
        << " algorithm=" << params.algorithm << " " << params.describe()
        << " seed=" << seed << "\n";
    if (!winner_tag.empty()) out << "# winner=" << winner_tag << "\n";
    out << "k,t,gamma,f,g\n";
    for (auto& [label, trace] : traces) {
      if (traces.size() > 1) out << "# " << label << "\n";
      write_trace_csv(out, *trace, {}, /*column_header=*/false);
    }
  }
  if (!trace_json.empty()) {
    std::ofstream out(trace_json, std::ios::binary);
    if (!out) throw std::runtime_error("cmd_solve: cannot open " + trace_json);
    json j = json::array();
    for (auto& [label, trace] : traces) {
      json entry = trace_to_json(*trace);
      entry["label"] = label;
      j.push_back(std::move(entry));
    }
    out << j.dump(2) << '\n';
  }
  return record;
}

inline RunRecord cmd_solve(const std::string& instance_path, const SolveParams& params,
                           const std::string& out_csv, const std::string& trace_json,
                           std::uint64_t seed) {
  return cmd_solve(load_instance(instance_path), params, out_csv, trace_json, seed);
}

struct ExperimentConfig {
  std::string kind = "quad-uniform";
  std::vector<std::size_t> n_list;
  std::string m_rule = "half";  // half | equal | one-and-half
  int repeats = 20;
  std::uint64_t seed = 0;
  int jobs = 1;
  int iterations = 100;
  double gamma = 0.01;
  double eps = 1e-6;
  int grid_points = 21;
  int polish_restarts = 20;
};

inline std::size_t apply_m_rule(const std::string& rule, std::size_t n) {
  std::size_t m;
  if (rule == "half") {
    m = std::size_t(std::floor(0.5 * double(n)));
  } else if (rule == "equal") {
    m = n;
  } else if (rule == "one-and-half") {
    m = std::size_t(std::floor(1.5 * double(n)));
  } else {
    throw std::invalid_argument("unknown m rule \"" + rule +
                                "\" (expected half, equal or one-and-half)");
  }
  require(m >= 1, "m rule \"" + rule + "\" gives m=0 at n=" + std::to_string(n));
  return m;
}

namespace detail {

inline void parallel_for(std::size_t count, int jobs,
                         const std::function<void(std::size_t)>& body) {
  jobs = std::max(1, std::min<int>(jobs, int(count)));
  if (jobs == 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex err_mutex;
  std::exception_ptr error;
  std::vector<std::thread> workers;
  workers.reserve(std::size_t(jobs));
  for (int w = 0; w < jobs; ++w) {
    workers.emplace_back([&] {
      for (;;) {
        std::size_t i = next.fetch_add(1);
        if (i >= count) return;
        try {
          body(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(err_mutex);
          if (!error) error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& t : workers) t.join();
  if (error) std::rethrow_exception(error);
}

struct CellResult {
  double two_phase = 0.0, nonmonotone = 0.0, proj_grad = 0.0;
  std::optional<double> oracle;
};

inline void mean_std(const std::vector<double>& xs, double& mean, double& stddev) {
  mean = 0.0;
  for (double x : xs) mean += x;
  mean /= double(xs.size());
  double var = 0.0;
  for (double x : xs) var += (x - mean) * (x - mean);
  stddev = std::sqrt(var / double(xs.size()));
}

}  // namespace detail

/// Sweep (n, repeat) cells: generate an instance, run the three solvers, and
/// aggregate mean/std of values (and of ratios versus the grid+polish oracle
/// when the dimension admits one). Cells may run in a worker pool; the output
/// is written in deterministic order and is byte-identical given the config.
inline void cmd_experiment(const ExperimentConfig& cfg, std::ostream& csv,
                           std::ostream& log) {
  require(cfg.repeats >= 1, "experiment: repeats must be >= 1");
  require(!cfg.n_list.empty(), "experiment: empty n list");
  generate_instance(cfg.kind, 1, 1, 0);  // validates kind early

  struct Cell {
    std::size_t n_index;
    int repeat;
  };
  std::vector<Cell> cells;
  for (std::size_t ni = 0; ni < cfg.n_list.size(); ++ni)
    for (int rep = 0; rep < cfg.repeats; ++rep) cells.push_back({ni, rep});
  std::vector<detail::CellResult> results(cells.size());

  Rng root(cfg.seed);
  detail::parallel_for(cells.size(), cfg.jobs, [&](std::size_t idx) {
    const Cell& cell = cells[idx];
    std::size_t n = cfg.n_list[cell.n_index];
    std::size_t m = apply_m_rule(cfg.m_rule, n);
    std::uint64_t cell_seed =
        root.fork(cell.n_index * 1000003ULL + std::uint64_t(cell.repeat)).next_u64();
    Instance inst = generate_instance(cfg.kind, n, m, cell_seed);
    auto view = maximization_view(inst);

    detail::CellResult& r = results[idx];
    TwoPhaseConfig tp;
    tp.k1 = tp.k2 = cfg.iterations;
    tp.eps1 = tp.eps2 = cfg.eps;
    r.two_phase = two_phase_fw(*view, inst.polytope, tp).winner_value();
    r.nonmonotone = nonmonotone_fw(*view, inst.polytope, cfg.gamma).trace.values.back();
    r.proj_grad =
        projected_gradient_ascent(*view, inst.polytope, cfg.iterations).trace.values.back();
    if (n <= kOracleGridDimCap) {
      OracleResult oracle = brute_force_opt(*view, inst.polytope, cfg.grid_points,
                                            cfg.polish_restarts, Rng(cell_seed).fork(77).next_u64());
      r.oracle = oracle.value;
    }
  });

  std::ostringstream ns;
  for (std::size_t i = 0; i < cfg.n_list.size(); ++i)
    ns << (i ? "," : "") << cfg.n_list[i];
  csv << "# drsubmax experiment kind=" << cfg.kind << " n=" << ns.str()
      << " m_rule=" << cfg.m_rule << " repeats=" << cfg.repeats << " seed=" << cfg.seed
      << " iterations=" << cfg.iterations << " gamma=" << format_double(cfg.gamma)
      << " eps=" << format_double(cfg.eps) << " grid=" << cfg.grid_points
      << " polish=" << cfg.polish_restarts << "\n";
  csv << "kind,n,m,algorithm,repeats,oracle,mean_value,std_value,mean_ratio,std_ratio\n";

  const char* algo_names[3] = {"two-phase-fw", "nonmonotone-fw", "proj-grad"};
  for (std::size_t ni = 0; ni < cfg.n_list.size(); ++ni) {
    std::size_t n = cfg.n_list[ni];
    std::size_t m = apply_m_rule(cfg.m_rule, n);
    for (int a = 0; a < 3; ++a) {
      std::vector<double> values, ratios;
      for (std::size_t idx = 0; idx < cells.size(); ++idx) {
        if (cells[idx].n_index != ni) continue;
        const detail::CellResult& r = results[idx];
        double v = a == 0 ? r.two_phase : a == 1 ? r.nonmonotone : r.proj_grad;
        values.push_back(v);
        if (r.oracle && *r.oracle > 0.0) ratios.push_back(v / *r.oracle);
      }
      double mv, sv;
      detail::mean_std(values, mv, sv);
      csv << cfg.kind << ',' << n << ',' << m << ',' << algo_names[a] << ','
          << values.size() << ',';
      if (ratios.size() == values.size()) {
        double mr, sr;
        detail::mean_std(ratios, mr, sr);
        csv << 1 << ',' << format_double(mv) << ',' << format_double(sv) << ','
            << format_double(mr) << ',' << format_double(sr) << '\n';
      } else {
        csv << 0 << ',' << format_double(mv) << ',' << format_double(sv) << ",,\n";
      }
    }
    log << "n=" << n << " done\n";
  }
}

inline const std::vector<std::string>& verify_suite_names() {
  static const std::vector<std::string> names = {
      "dr", "weak-dr", "lemma1", "key-claim", "lemma3", "growth", "qlb", "kalpha"};
  return names;
}

/// Run one named check suite against an instance; returns the report JSON.
inline json run_verify_suite(const Instance& inst, const std::string& suite, int samples,
                             std::uint64_t seed) {
  auto view = maximization_view(inst);
  Rng rng(seed);

  if (suite == "dr") return report_to_json(check_dr_hessian(*view, samples, 1e-6, seed));
  if (suite == "weak-dr") return report_to_json(check_weak_dr(*view, samples, seed));
  if (suite == "lemma1") return report_to_json(check_lemma1(*view, 0.0, samples, seed));
  if (suite == "key-claim") {
    OracleResult oracle =
        brute_force_opt(*view, inst.polytope, 21, 20, rng.fork(77).next_u64());
    return report_to_json(
        check_key_claim(*view, inst.polytope, oracle.x, samples, seed));
  }
  if (suite == "lemma3") {
    OracleResult oracle =
        brute_force_opt(*view, inst.polytope, 21, 20, rng.fork(77).next_u64());
    Vec theta = scale(view->box_hi(), 0.5);
    for (double& t : theta)
      if (t <= 0.0) t = 1e-9;
    return report_to_json(check_lemma3(*view, theta, oracle.x, samples, seed));
  }
  if (suite == "growth") {
    double gamma = 0.01;
    auto run = nonmonotone_fw(*view, inst.polytope, gamma);
    json j = report_to_json(check_growth_bound(run.trace, inst.polytope.ubar(), gamma));
    j["seed"] = seed;
    return j;
  }
  if (suite == "qlb") {
    double lipschitz;
    if (dynamic_cast<const QuadraticObjective*>(view.get())) {
      lipschitz = *view->lipschitz_hint();
    } else {
      // sampled estimate with headroom; an under-estimate would plant
      // spurious violations
      lipschitz = 2.0 * estimate_lipschitz(*view, std::max(samples, 64),
                                           rng.fork(99).next_u64());
    }
    json j = report_to_json(check_quadratic_lower_bound(*view, lipschitz, samples, seed));
    j["lipschitz"] = lipschitz;
    return j;
  }
  if (suite == "kalpha") {
    std::shared_ptr<const Objective> target = inst.objective;
    SignVector alpha = SignVector::all_plus(inst.objective->dim());
    if (auto logistic =
            std::dynamic_pointer_cast<const LogisticObjective>(inst.objective)) {
      alpha = infer_sign_vector(logistic->data());
      target = std::make_shared<NegatedObjective>(logistic);
    }
    return kalpha_report_to_json(verify_kalpha(*target, alpha, samples, 1e-6, seed));
  }
  throw std::invalid_argument("unknown verify suite \"" + suite + "\"");
}

/// Exit code 0 iff every selected check passes; the full report goes to
/// `out` as JSON and a short line per check to `log`.
inline int cmd_verify(const std::string& instance_path, const std::string& suite,
                      int samples, std::uint64_t seed, std::ostream& out,
                      std::ostream& log) {
  Instance inst = load_instance(instance_path);
  std::vector<std::string> suites;
  if (suite == "all") {
    suites = verify_suite_names();
  } else {
    suites.push_back(suite);
  }

  json reports = json::array();
  bool all_pass = true;
  for (const std::string& s : suites) {
    json r = run_verify_suite(inst, s, samples, seed);
    bool pass = r.at("pass").get<bool>();
    all_pass = all_pass && pass;
    log << (pass ? "[pass] " : "[FAIL] ") << s << " (max_excess="
        << format_double(r.at("max_excess").get<double>()) << ")\n";
    reports.push_back(std::move(r));
  }
  json summary{{"instance", inst.id()}, {"suite", suite}, {"samples", samples},
               {"seed", seed},          {"pass", all_pass}, {"reports", std::move(reports)}};
  out << summary.dump(2) << '\n';
  return all_pass ? kExitOk : kExitCheckFailure;
}

/// Render a verify-report JSON or a drsubmax CSV as an aligned text table.
inline int cmd_report(const std::string& path, std::ostream& out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cmd_report: cannot open " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  std::string text = buffer.str();
  std::size_t first = text.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) throw SchemaError("cmd_report: empty file");

  if (text[first] == '{' || text[first] == '[') {
    json j = json::parse(text);
    if (j.contains("reports")) {
      out << "instance: " << j.value("instance", std::string("?")) << "\n";
      out << "suite: " << j.value("suite", std::string("?"))
          << "  samples: " << j.value("samples", 0) << "  seed: " << j.value("seed", 0)
          << "\n\n";
      out << "check                  pass  checks  violations  max_excess\n";
      for (const json& r : j.at("reports")) {
        char line[160];
        std::snprintf(line, sizeof(line), "%-22s %-5s %7d %11zu  %s\n",
                      r.value("check", std::string("?")).c_str(),
                      r.at("pass").get<bool>() ? "yes" : "NO",
                      r.value("checks_run", r.value("samples", 0)),
                      r.at("violations").size(),
                      format_double(r.at("max_excess").get<double>()).c_str());
        out << line;
      }
      out << "\noverall: " << (j.at("pass").get<bool>() ? "pass" : "FAIL") << "\n";
      return j.at("pass").get<bool>() ? kExitOk : kExitCheckFailure;
    }
    out << j.dump(2) << '\n';
    return kExitOk;
  }

  // CSV: echo comments, align the rest
  std::vector<std::vector<std::string>> rows;
  std::istringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      out << line << '\n';
      continue;
    }
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (line.back() == ',') cells.push_back("");
    rows.push_back(std::move(cells));
  }
  std::vector<std::size_t> widths;
  for (const auto& r : rows)
    for (std::size_t c = 0; c < r.size(); ++c) {
      if (widths.size() <= c) widths.resize(c + 1, 0);
      widths[c] = std::max(widths[c], r[c].size());
    }
  for (const auto& r : rows) {
    for (std::size_t c = 0; c < r.size(); ++c) {
      out << r[c];
      if (c + 1 < r.size()) out << std::string(widths[c] - r[c].size() + 2, ' ');
    }
    out << '\n';
  }
  return kExitOk;
}

}  // namespace drsm::cli
