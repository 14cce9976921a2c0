#pragma once

#include "lorank/ip.hpp"
#include "lorank/pdal.hpp"
#include "lorank/truss.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace lorank::cli {

enum ExitCode : int {
  kOk = 0,
  kNotConverged = 1,
  kUsage = 2,
  kInputError = 3,
  kSolverFailure = 4,
};

/// A problem plus, for generated or sidecar-backed instances, its truss.
struct Instance {
  std::string name;
  SdpProblem prob;
  std::optional<GroundStructure> geometry;
  TrussSdpSpec spec;
};

/// Parses tru<g>, tru<g>e, vib<g>, vib<g>e.
std::optional<std::pair<TrussVariant, int>> parse_generator_name(const std::string& name,
                                                                 bool* e_variant = nullptr);
std::string instance_name(TrussVariant v, int g, bool e_variant);

Instance generate_instance(TrussVariant v, int g, double t_lower);
/// Generator name or path to an SDPA file; a sibling `<stem>.geom.json`
/// sidecar is picked up when present.
Instance resolve_instance(const std::string& arg);

/// Writes `<dir>/<name>.dat-s` and `<dir>/<name>.geom.json`; returns both paths.
std::vector<std::string> write_instance(const Instance& inst, const std::string& dir);

struct RunConfig {
  std::string solver = "ip";
  /// Empty selects the solver default (ip: hybrid, pdal: gamma).
  std::string precond;
  /// Integer k for every block, or "auto".
  std::string rank;
  double tol = 1e-5;
  int cg_maxiter = 100000;
  /// 0 keeps the solver default.
  int maxiter = 0;
  std::uint64_t seed = 0;
  bool diag = false;
  /// JSON file with PDAL parameter overrides.
  std::string config_path;
  bool verbose = false;
};

struct RunResult {
  SolveReport report;
  PrimalDualPoint point;
  /// Dense diagnostics (JSON array text), empty unless requested.
  std::string diagnostics;
};

IpConfig make_ip_config(const RunConfig& rc);
/// Starts from the tru or vib table depending on the instance.
PdalConfig make_pdal_config(const RunConfig& rc, const Instance& inst);

/// Throws std::invalid_argument on bad settings.
RunResult run_solve(const Instance& inst, const RunConfig& rc);

/// Report JSON with the run settings and optional diagnostics attached.
std::string result_json(const RunResult& res, const RunConfig& rc);

int exit_code(const SolveReport& rep, double tol);

/// One CSV row per (instance, solver, precond); failures become rows with
/// status "error: ...". Empty instance list gives the header only.
std::string bench_csv(const std::vector<std::string>& instances,
                      const std::vector<std::string>& solvers,
                      const std::vector<std::string>& preconds, const RunConfig& base);

/// Truss checks on a solved instance as JSON text.
std::string verification_json(const Instance& inst, const RunResult& res);

}  // namespace lorank::cli
