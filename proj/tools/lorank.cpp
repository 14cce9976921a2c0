#include "cli.hpp"

#include "lorank/report.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>

using namespace lorank;
using namespace lorank::cli;

namespace {

void add_solver_flags(CLI::App* cmd, RunConfig& rc) {
  cmd->add_option("--solver", rc.solver, "ip or pdal")->check(CLI::IsMember({"ip", "pdal"}));
  cmd->add_option("--precond", rc.precond, "none|alpha|beta|hybrid|tilde|gamma|delta");
  cmd->add_option("--rank", rc.rank, "expected outliers per block, or 'auto'");
  cmd->add_option("--tol", rc.tol, "DIMACS tolerance")->check(CLI::PositiveNumber);
  cmd->add_option("--cg-maxiter", rc.cg_maxiter, "CG iteration cap per solve");
  cmd->add_option("--maxiter", rc.maxiter, "major iteration cap (0: solver default)");
  cmd->add_option("--seed", rc.seed, "recorded in the report; solvers are deterministic");
  cmd->add_option("--config", rc.config_path, "JSON file with penalty-solver parameters")
      ->check(CLI::ExistingFile);
  cmd->add_flag("--diag", rc.diag, "dense diagnostics (n <= 400)");
  cmd->add_flag("-v,--verbose", rc.verbose, "per-iteration log on stderr");
}

void emit(const std::string& text, const std::string& path) {
  const char* nl = (!text.empty() && text.back() == '\n') ? "" : "\n";
  if (path.empty()) {
    std::cout << text << nl;
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text << nl;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Low-rank preconditioned SDP solvers for truss topology problems"};
  app.require_subcommand(1);

  // gen
  std::string variant;
  int g = 3;
  double eps = 0.0;
  std::string out_dir = ".";
  auto* gen = app.add_subcommand("gen", "write a truss instance and its geometry sidecar");
  gen->add_option("variant", variant, "tru or vib")->required()->check(CLI::IsMember({"tru", "vib"}));
  gen->add_option("size", g, "grid size g")->required()->check(CLI::Range(2, 1000));
  gen->add_option("--eps", eps, "lower bar bound (> 0 gives the e-variant)")
      ->check(CLI::NonNegativeNumber);
  gen->add_option("--out", out_dir, "output directory");

  // solve
  RunConfig rc;
  std::string instance, out_path, csv_path;
  auto* solve = app.add_subcommand("solve", "solve one instance and print a JSON report");
  solve->add_option("instance", instance, "SDPA file or generator name (tru3, vib5e, ...)")
      ->required();
  add_solver_flags(solve, rc);
  solve->add_option("--out", out_path, "write the report here instead of stdout");
  solve->add_option("--csv", csv_path, "append a CSV row to this file");

  // bench
  std::vector<std::string> instances;
  std::vector<std::string> solvers{"ip"};
  std::vector<std::string> preconds;
  RunConfig brc;
  std::string bench_out;
  auto* bench = app.add_subcommand("bench", "CSV table over instances, solvers and preconditioners");
  bench->add_option("instances", instances, "SDPA files or generator names");
  bench->add_option("--solvers", solvers, "solvers to run")->delimiter(',');
  bench->add_option("--preconds", preconds, "preconditioners (default: solver default)")
      ->delimiter(',');
  bench->add_option("--tol", brc.tol, "DIMACS tolerance")->check(CLI::PositiveNumber);
  bench->add_option("--rank", brc.rank, "expected outliers per block, or 'auto'");
  bench->add_option("--cg-maxiter", brc.cg_maxiter, "CG iteration cap per solve");
  bench->add_option("--maxiter", brc.maxiter, "major iteration cap");
  bench->add_option("--seed", brc.seed, "recorded only");
  bench->add_option("--out", bench_out, "CSV path (default stdout)");

  // verify
  RunConfig vrc;
  std::string vinstance, vout;
  auto* verify = app.add_subcommand("verify", "solve a truss instance and check the design");
  verify->add_option("instance", vinstance, "generator name or SDPA file with sidecar")
      ->required();
  add_solver_flags(verify, vrc);
  verify->add_option("--out", vout, "write the verification JSON here");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      const Instance inst = generate_instance(parse_truss_variant(variant), g, eps);
      for (const auto& p : write_instance(inst, out_dir)) std::cout << p << "\n";
      std::fprintf(stderr, "%s: n=%d blocks=%d lin=%d\n", inst.name.c_str(),
                   inst.prob.num_vars(), inst.prob.num_blocks(), inst.prob.num_lin());
      return kOk;
    }
    if (*solve) {
      const Instance inst = resolve_instance(instance);
      const RunResult res = run_solve(inst, rc);
      emit(result_json(res, rc), out_path);
      if (!csv_path.empty()) {
        const bool fresh = !std::ifstream(csv_path).good();
        std::ofstream csv(csv_path, std::ios::app);
        if (fresh) csv << csv_header() << "\n";
        csv << csv_row(res.report) << "\n";
      }
      if (res.report.status == "numerical_failure" ||
          res.report.status == "line_search_failure" ||
          res.report.status == "scaling_failure") {
        std::fprintf(stderr, "solver stopped: %s\n", res.report.status.c_str());
      }
      return exit_code(res.report, rc.tol);
    }
    if (*bench) {
      emit(bench_csv(instances, solvers, preconds, brc), bench_out);
      return kOk;
    }
    if (*verify) {
      const Instance inst = resolve_instance(vinstance);
      const RunResult res = run_solve(inst, vrc);
      emit(verification_json(inst, res), vout);
      return exit_code(res.report, vrc.tol);
    }
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kInputError;
  }
  return kOk;
}
