#pragma once

#include "lorank/model.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace lorank {

struct IterationRecord {
  int iter = 0;
  /// CG steps: IP predictor + corrector, PDAL summed over inner Newton steps.
  int cg = 0;
  int cg_corrector = 0;
  int inner = 0;
  double alpha = 0.0;
  double beta = 0.0;
  double mu = 0.0;
  double pi_lmi = 0.0;
  double pi_lin = 0.0;
  double dimacs = 0.0;
  std::string precond;
  double seconds = 0.0;
};

struct SpectrumSummary {
  /// Largest three eigenvalues, descending.
  std::vector<double> top;
  double median = 0.0;
};

struct SolveReport {
  std::string solver;
  std::string precond;
  std::string instance;
  std::string status;
  bool converged = false;
  int iterations = 0;
  int cg_total = 0;
  double seconds = 0.0;
  DimacsErrors dimacs;
  /// SDPA orientation: primal −bᵀy, dual −(C•X + dᵀx_lin).
  double objective_primal = 0.0;
  double objective_dual = 0.0;
  std::vector<SpectrumSummary> spectra;
  std::vector<IterationRecord> trace;

  std::vector<int> cg_per_iteration() const;
};

std::vector<SpectrumSummary> summarize_spectra(const BlockSymMatrix& x);

/// JSON document with "schema": 1.
std::string to_json(const SolveReport& rep, bool with_trace = true);

/// Columns: instance, solver, precond, iter, cg_iter, cpu, cpu_per_iter,
/// objective, dimacs, gap_ratio, status.
std::string csv_header();
std::string csv_row(const SolveReport& rep);

}  // namespace lorank
