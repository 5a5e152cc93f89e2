#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "drsm/cli.hpp"

using namespace drsm;
using Catch::Approx;

namespace {

namespace fs = std::filesystem;

std::string temp_path(const std::string& name) {
  return (fs::temp_directory_path() / name).string();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_binary(const std::string& args) {
  std::string cmd = std::string(DRSUBMAX_BIN) + " " + args + " >/dev/null 2>&1";
  int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  return WEXITSTATUS(status);
}

}  // namespace

TEST_CASE("generate writes deterministic loadable instances") {
  std::string p1 = temp_path("cli_gen_1.json");
  std::string p2 = temp_path("cli_gen_2.json");
  std::ostringstream log;
  cli::cmd_generate("quad-uniform", 8, 4, 5, p1, log);
  cli::cmd_generate("quad-uniform", 8, 4, 5, p2, log);
  CHECK(slurp(p1) == slurp(p2));

  Instance inst = load_instance(p1);
  CHECK(inst.params.n == 8);
  CHECK(inst.params.m == 4);
  CHECK(contains(inst.polytope, zeros(8)));

  std::string soft = temp_path("cli_gen_soft.json");
  cli::cmd_generate("softmax", 8, 12, 5, soft, log);
  CHECK(load_instance(soft).objective->kind() == "softmax");

  CHECK_THROWS_AS(cli::cmd_generate("bogus", 4, 2, 0, p1, log), std::invalid_argument);
  std::remove(p1.c_str());
  std::remove(p2.c_str());
  std::remove(soft.c_str());
}

TEST_CASE("solve runs each algorithm and writes traces") {
  Instance inst = gen_quadratic_uniform(4, 2, 3);

  cli::SolveParams nm;
  nm.algorithm = "nonmonotone-fw";
  nm.gamma = 0.01;
  std::string csv = temp_path("cli_trace.csv");
  cli::RunRecord record = cli::cmd_solve(inst, nm, csv, "", 0);
  CHECK(record.iterations == 100);  // gamma = 1/100 gives exactly 100 steps
  CHECK_FALSE(record.oracle_value.has_value());
  std::string trace = slurp(csv);
  CHECK(trace.find("k,t,gamma,f,g") != std::string::npos);
  CHECK(trace.find("\n100,1,") != std::string::npos);  // final row at t = 1

  cli::SolveParams tp;
  tp.algorithm = "two-phase-fw";
  tp.with_oracle = true;
  tp.grid_points = 11;
  tp.polish_restarts = 5;
  cli::RunRecord tp_record = cli::cmd_solve(inst, tp, csv, temp_path("cli_trace.json"), 0);
  REQUIRE(tp_record.oracle_value.has_value());
  REQUIRE(tp_record.ratio.has_value());
  CHECK(*tp_record.ratio == Approx(tp_record.final_value / *tp_record.oracle_value));
  std::string tp_trace = slurp(csv);
  CHECK(tp_trace.find("# phase 1 (P)") != std::string::npos);
  CHECK(tp_trace.find("# phase 2 (Q)") != std::string::npos);
  CHECK(tp_trace.find("# winner=") != std::string::npos);

  cli::SolveParams pg;
  pg.algorithm = "proj-grad";
  pg.iterations = 50;
  cli::RunRecord pg_record = cli::cmd_solve(inst, pg, "", "", 0);
  CHECK(pg_record.iterations == 50);

  cli::SolveParams bad;
  bad.algorithm = "simulated-annealing";
  CHECK_THROWS_AS(cli::cmd_solve(inst, bad, "", "", 0), std::invalid_argument);

  std::remove(csv.c_str());
  std::remove(temp_path("cli_trace.json").c_str());
}

TEST_CASE("experiment aggregates per dimension and algorithm") {
  cli::ExperimentConfig cfg;
  cfg.kind = "quad-uniform";
  cfg.n_list = {4, 5};
  cfg.m_rule = "half";
  cfg.repeats = 2;
  cfg.seed = 1;
  cfg.grid_points = 11;
  cfg.polish_restarts = 5;
  std::ostringstream csv, log;
  cli::cmd_experiment(cfg, csv, log);
  std::string text = csv.str();

  CHECK(text.find("kind,n,m,algorithm,repeats,oracle,mean_value,std_value,mean_ratio,std_ratio\n") !=
        std::string::npos);
  CHECK(text.find("quad-uniform,4,2,two-phase-fw,2,1,") != std::string::npos);
  CHECK(text.find("quad-uniform,5,2,nonmonotone-fw,2,1,") != std::string::npos);
  CHECK(text.find("quad-uniform,5,2,proj-grad,2,1,") != std::string::npos);

  // reruns are byte-identical, including with a worker pool
  std::ostringstream rerun;
  cli::cmd_experiment(cfg, rerun, log);
  CHECK(rerun.str() == text);
  cfg.jobs = 4;
  std::ostringstream pooled;
  cli::cmd_experiment(cfg, pooled, log);
  CHECK(pooled.str() == text);
}

TEST_CASE("experiment with one repeat has zero std") {
  cli::ExperimentConfig cfg;
  cfg.kind = "quad-uniform";
  cfg.n_list = {4};
  cfg.repeats = 1;
  cfg.grid_points = 11;
  cfg.polish_restarts = 3;
  std::ostringstream csv, log;
  cli::cmd_experiment(cfg, csv, log);
  std::istringstream lines(csv.str());
  std::string line;
  int data_rows = 0;
  while (std::getline(lines, line)) {
    if (line.empty() || line[0] == '#' || line.rfind("kind,", 0) == 0) continue;
    ++data_rows;
    // std_value is the 8th comma-separated field
    std::istringstream ls(line);
    std::string cell;
    for (int c = 0; c < 8; ++c) std::getline(ls, cell, ',');
    CHECK(cell == "0");
  }
  CHECK(data_rows == 3);
}

TEST_CASE("m rules") {
  CHECK(cli::apply_m_rule("half", 5) == 2);
  CHECK(cli::apply_m_rule("equal", 5) == 5);
  CHECK(cli::apply_m_rule("one-and-half", 5) == 7);
  CHECK_THROWS_AS(cli::apply_m_rule("half", 1), std::invalid_argument);
  CHECK_THROWS_AS(cli::apply_m_rule("double", 4), std::invalid_argument);
}

TEST_CASE("verify suites and exit codes") {
  std::string good_path = temp_path("cli_verify_good.json");
  save_instance(gen_quadratic_uniform(4, 2, 9), good_path);
  std::ostringstream out, log;
  CHECK(cli::cmd_verify(good_path, "dr", 30, 1, out, log) == cli::kExitOk);
  json j = json::parse(out.str());
  CHECK(j.at("pass") == true);
  CHECK(j.at("reports").size() == 1);

  // planted positive off-diagonal entry must fail the dr suite
  Instance planted = gen_quadratic_uniform(3, 2, 9);
  const auto& q = dynamic_cast<const QuadraticObjective&>(*planted.objective);
  Matrix h = q.quad_matrix();
  h(0, 1) = h(1, 0) = 0.5;
  planted.objective = std::make_shared<QuadraticObjective>(
      h, q.linear_term(), q.offset(), q.box_hi(), /*require_dr=*/false);
  std::string bad_path = temp_path("cli_verify_bad.json");
  save_instance(planted, bad_path);
  std::ostringstream out2, log2;
  CHECK(cli::cmd_verify(bad_path, "dr", 30, 1, out2, log2) == cli::kExitCheckFailure);

  std::ostringstream out3, log3;
  CHECK_THROWS_AS(cli::cmd_verify(good_path, "everything", 10, 1, out3, log3),
                  std::invalid_argument);

  // full suite on a small instance
  std::ostringstream out4, log4;
  CHECK(cli::cmd_verify(good_path, "all", 25, 1, out4, log4) == cli::kExitOk);
  json all = json::parse(out4.str());
  CHECK(all.at("reports").size() == cli::verify_suite_names().size());

  std::remove(good_path.c_str());
  std::remove(bad_path.c_str());
}

TEST_CASE("report renders JSON and CSV") {
  std::string report_path = temp_path("cli_report.json");
  {
    std::string instance_path = temp_path("cli_report_inst.json");
    save_instance(gen_quadratic_uniform(3, 2, 2), instance_path);
    std::ofstream out(report_path);
    std::ostringstream log;
    cli::cmd_verify(instance_path, "dr", 10, 1, out, log);
    std::remove(instance_path.c_str());
  }
  std::ostringstream rendered;
  CHECK(cli::cmd_report(report_path, rendered) == cli::kExitOk);
  CHECK(rendered.str().find("dr-hessian") != std::string::npos);
  CHECK(rendered.str().find("overall: pass") != std::string::npos);
  std::remove(report_path.c_str());

  std::string csv_path = temp_path("cli_report.csv");
  {
    std::ofstream out(csv_path);
    out << "# hello\na,b\n1,22\n";
  }
  std::ostringstream table;
  CHECK(cli::cmd_report(csv_path, table) == cli::kExitOk);
  CHECK(table.str().find("# hello") != std::string::npos);
  std::remove(csv_path.c_str());
}

TEST_CASE("binary end-to-end") {
  CHECK(run_binary("--help") == 0);
  CHECK(run_binary("frobnicate") == cli::kExitUsage);
  CHECK(run_binary("solve") == cli::kExitUsage);  // missing required args

  std::string inst = temp_path("cli_bin_inst.json");
  std::string trace = temp_path("cli_bin_trace.csv");
  CHECK(run_binary("--seed 3 generate --kind quad-uniform -n 5 -m 2 --out " + inst) == 0);
  CHECK(run_binary("solve " + inst + " --algorithm nonmonotone-fw --out " + trace) == 0);
  CHECK(slurp(trace).find("k,t,gamma,f,g") != std::string::npos);
  CHECK(run_binary("verify " + inst + " --suite dr --samples 20") == 0);
  CHECK(run_binary("verify " + inst + " --suite nope") == cli::kExitUsage);
  CHECK(run_binary("solve missing-file.json --algorithm proj-grad") != 0);
  std::remove(inst.c_str());
  std::remove(trace.c_str());
}

TEST_CASE("config file supplies defaults, flags win") {
  std::string cfg = temp_path("cli_bin_cfg.ini");
  {
    std::ofstream out(cfg);
    out << "seed=9\n";
  }
  std::string from_cfg = temp_path("cli_bin_cfg_inst.json");
  std::string from_flag = temp_path("cli_bin_flag_inst.json");
  std::string overridden = temp_path("cli_bin_override_inst.json");
  CHECK(run_binary("--config " + cfg + " generate --kind quad-uniform -n 4 -m 2 --out " +
                   from_cfg) == 0);
  CHECK(run_binary("--seed 9 generate --kind quad-uniform -n 4 -m 2 --out " + from_flag) ==
        0);
  CHECK(slurp(from_cfg) == slurp(from_flag));
  CHECK(run_binary("--config " + cfg + " --seed 10 generate --kind quad-uniform -n 4 -m 2 --out " +
                   overridden) == 0);
  CHECK(slurp(overridden) != slurp(from_flag));
  std::remove(cfg.c_str());
  std::remove(from_cfg.c_str());
  std::remove(from_flag.c_str());
  std::remove(overridden.c_str());
}
