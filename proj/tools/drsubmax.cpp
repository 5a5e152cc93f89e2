// drsubmax: maximize non-monotone DR-submodular functions over down-closed
// polytopes. Subcommands: generate | solve | experiment | verify | report.
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "drsm/cli.hpp"

namespace {

using namespace drsm;

int dispatch(CLI::App& app, int argc, char** argv) {
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return cli::kExitUsage;
  }
  return -1;  // parsed, no help requested
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file " + path);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Non-monotone DR-submodular maximization toolkit"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Read defaults from a config file (flags win)");
  app.get_config_formatter_base()->comment('#');

  std::uint64_t seed = 0;
  int jobs = 1;
  app.add_option("--seed", seed, "Global seed; every command is reproducible given it")
      ->capture_default_str();
  app.add_option("--jobs", jobs, "Worker threads for experiment sweeps")
      ->envname("DRSUBMAX_JOBS")
      ->capture_default_str();

  // generate
  auto* gen = app.add_subcommand("generate", "Generate a synthetic instance file");
  std::string gen_kind = "quad-uniform";
  std::size_t gen_n = 8, gen_m = 4;
  std::string gen_out = "instance.json";
  gen->add_option("--kind", gen_kind, "quad-uniform | quad-exp | softmax")
      ->capture_default_str();
  gen->add_option("-n,--dim", gen_n, "dimension")->capture_default_str();
  gen->add_option("-m,--rows", gen_m, "number of constraint rows")->capture_default_str();
  gen->add_option("--out", gen_out, "output path")->capture_default_str();

  // solve
  auto* solve = app.add_subcommand("solve", "Run one algorithm on an instance file");
  std::string solve_instance;
  cli::SolveParams solve_params;
  std::string solve_out, solve_trace_json;
  solve->add_option("instance", solve_instance, "instance JSON path")->required();
  solve->add_option("--algorithm", solve_params.algorithm,
                    "two-phase-fw | nonmonotone-fw | proj-grad")
      ->required();
  solve->add_option("--gamma", solve_params.gamma, "nonmonotone-fw step size")
      ->capture_default_str();
  solve->add_option("--iterations", solve_params.iterations,
                    "iteration budget (two-phase K1=K2, proj-grad steps)")
      ->capture_default_str();
  solve->add_option("--eps", solve_params.eps, "two-phase stopping tolerance")
      ->capture_default_str();
  solve->add_flag("--oracle", solve_params.with_oracle,
                  "also compute the grid+polish oracle and the ratio");
  solve->add_option("--grid", solve_params.grid_points, "oracle grid points per axis")
      ->capture_default_str();
  solve->add_option("--polish", solve_params.polish_restarts, "oracle polish restarts")
      ->capture_default_str();
  solve->add_option("--out", solve_out, "trace CSV path");
  solve->add_option("--trace-json", solve_trace_json, "full iterate dump (JSON)");

  // experiment
  auto* exp = app.add_subcommand("experiment", "Sweep n and repeats, aggregate a CSV");
  cli::ExperimentConfig exp_cfg;
  std::string exp_out = "experiment.csv";
  exp->add_option("--kind", exp_cfg.kind, "quad-uniform | quad-exp | softmax")
      ->capture_default_str();
  exp->add_option("--n-list", exp_cfg.n_list, "dimensions to sweep")->required();
  exp->add_option("--m-rule", exp_cfg.m_rule, "half | equal | one-and-half")
      ->capture_default_str();
  exp->add_option("--repeats", exp_cfg.repeats, "instances per dimension")
      ->capture_default_str();
  exp->add_option("--iterations", exp_cfg.iterations, "iterations per algorithm")
      ->capture_default_str();
  exp->add_option("--gamma", exp_cfg.gamma, "nonmonotone-fw step size")
      ->capture_default_str();
  exp->add_option("--grid", exp_cfg.grid_points, "oracle grid points per axis")
      ->capture_default_str();
  exp->add_option("--polish", exp_cfg.polish_restarts, "oracle polish restarts")
      ->capture_default_str();
  exp->add_option("--out", exp_out, "aggregate CSV path")->capture_default_str();

  // verify
  auto* verify = app.add_subcommand("verify", "Run property-check suites on an instance");
  std::string verify_instance, verify_suite = "all", verify_out;
  int verify_samples = 50;
  verify->add_option("instance", verify_instance, "instance JSON path")->required();
  verify->add_option("--suite", verify_suite,
                     "dr | weak-dr | lemma1 | key-claim | lemma3 | growth | qlb | kalpha | all")
      ->capture_default_str();
  verify->add_option("--samples", verify_samples, "samples/trials per check")
      ->capture_default_str();
  verify->add_option("--out", verify_out, "report JSON path (default: stdout)");

  // report
  auto* report = app.add_subcommand("report", "Render a report JSON or CSV as a table");
  std::string report_path;
  report->add_option("file", report_path, "report JSON or CSV path")->required();

  if (int code = dispatch(app, argc, argv); code >= 0) return code;

  try {
    if (*gen) {
      cli::cmd_generate(gen_kind, gen_n, gen_m, seed, gen_out, std::cout);
      return cli::kExitOk;
    }
    if (*solve) {
      cli::RunRecord record =
          cli::cmd_solve(solve_instance, solve_params, solve_out, solve_trace_json, seed);
      std::cout << cli::run_record_to_json(record).dump(2) << "\n";
      return cli::kExitOk;
    }
    if (*exp) {
      exp_cfg.seed = seed;
      exp_cfg.jobs = jobs;
      auto out = open_out(exp_out);
      cli::cmd_experiment(exp_cfg, out, std::cout);
      std::cout << "wrote " << exp_out << "\n";
      return cli::kExitOk;
    }
    if (*verify) {
      if (!verify_out.empty()) {
        auto out = open_out(verify_out);
        return cli::cmd_verify(verify_instance, verify_suite, verify_samples, seed, out,
                               std::cout);
      }
      return cli::cmd_verify(verify_instance, verify_suite, verify_samples, seed,
                             std::cout, std::cerr);
    }
    if (*report) {
      return cli::cmd_report(report_path, std::cout);
    }
  } catch (const SchemaError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return cli::kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return cli::kExitUsage;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return cli::kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return cli::kExitNumerical;
  }
  return cli::kExitUsage;
}
