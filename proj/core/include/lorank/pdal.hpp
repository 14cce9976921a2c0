#pragma once

#include "lorank/model.hpp"
#include "lorank/pcg.hpp"
#include "lorank/penalty.hpp"
#include "lorank/precond.hpp"
#include "lorank/report.hpp"
#include "lorank/spectral_split.hpp"

#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace lorank {

struct PdalIterationView;

/// Penalty solver settings. The LMI blocks always use the hyperbolic
/// penalty; `lin_penalty` applies to the linear block.
struct PdalConfig {
  double pi_lin_min = 1e-9;
  double pi_lmi_min = 1e-5;
  double pi_lin_upd = 0.5;
  double pi_lmi_upd = 0.5;
  double gamma_lin = 0.5;
  double gamma_lmi = 0.5;
  double r = 0.01;
  /// Outer stop on the primal-dual error e(y, X).
  double eps = 1e-6;
  double eps_dimacs = 1e-5;
  /// Inner tolerance max(inner_floor, inner_start·inner_decay^k) at outer k.
  double inner_start = 1e-1;
  double inner_decay = 0.1;
  double inner_floor = 1e-12;
  /// Linear multipliers are kept above this fraction of max(1, max x_lin) so
  /// a bound that turns active late can recover its multiplier.
  double lin_mult_floor = 1e-10;
  int maxiter = 200;
  int inner_maxiter = 50;
  int max_halvings = 40;
  double armijo = 0.05;
  PenaltyFn lin_penalty{PenaltyKind::qlog, 0.5};
  PrecondKind precond = PrecondKind::gamma;
  RankHints rank;
  TauRule tau_rule = TauRule::loraine;
  CgTolerance cg_tol;
  int cg_maxiter = 100000;
  bool verbose = false;
  /// Called once per Newton step after the preconditioner is built.
  std::function<void(const PdalIterationView&)> observer;

  static PdalConfig tru();
  static PdalConfig vib();
};

/// Overrides the tabulated keys (pi_lin_min, pi_lmi_min, pi_lin_upd,
/// pi_lmi_upd, gamma_lin, gamma_lmi, r, eps) plus tau_q and eps_dimacs.
/// Throws std::invalid_argument on unknown keys or out-of-range values.
PdalConfig pdal_config_from_json(const std::string& text, PdalConfig base);
void validate(const PdalConfig& cfg);

struct PdalState {
  Vec y;
  /// X_i and x_lin.
  BlockSymMatrix mult;
  double pi_lmi = 1.0;
  double pi_lin = 1.0;
  Vec y_center;
  double r = 0.01;
  PenaltyFn lin_penalty;
};

/// Quantities that depend on y only (plus the fixed multipliers).
struct PdalEval {
  std::vector<Mat> a;
  std::vector<Mat> z;
  std::vector<Mat> xbar;
  /// D y − d
  Vec t;
  Vec xbar_lin;
  /// x_l·φ″_π(t_l), the diagonal of W̄
  Vec wbar;
};

/// Initial state: y = 0, X = I, x_lin = 1, π_lmi = 1.1·max(1, λ_max(A(0))).
PdalState pdal_initial_state(const SdpProblem& prob, const PdalConfig& cfg);

/// Throws DomainViolation outside the penalty domain.
PdalEval pdal_eval(const SdpProblem& prob, const PdalState& st, const Vec& y);

/// F(y) = −bᵀy + Σ X_i•Φ_π(A_i(y)) + Σ x_l φ_π(t_l) + (r/2)‖y − ȳ‖²
double aug_lagrangian_value(const SdpProblem& prob, const PdalState& st, const Vec& y);
Vec aug_lagrangian_grad(const SdpProblem& prob, const PdalState& st, const PdalEval& ev);
Vec aug_lagrangian_grad(const SdpProblem& prob, const PdalState& st, const Vec& y);

/// r·dy + Σ 𝐀_iᵀ vec(X̄ A_i(dy) Z + Z A_i(dy) X̄) + DᵀW̄D·dy
Vec hessian_matvec(const SdpProblem& prob, const PdalState& st, const PdalEval& ev,
                   const Vec& dy);
LinOp hessian_operator(const SdpProblem& prob, const PdalState& st, const PdalEval& ev);
/// r + diag(DᵀW̄D)
Vec hessian_lin_diag(const SdpProblem& prob, const PdalState& st, const PdalEval& ev);

struct PdResiduals {
  Vec g1;
  BlockSymMatrix g2;
};

/// G1 = −b + r(ŷ − ȳ) + A*(X̂) + Dᵀx̂, G2 = X̂ − X̄(ŷ). `ev` is taken at ŷ.
PdResiduals pd_residuals(const SdpProblem& prob, const PdalState& st, const PdalEval& ev,
                         const Vec& yhat, const BlockSymMatrix& xhat);
double merit(const PdResiduals& res);

/// Directional derivative of the merit function at ŷ along (dy, dX).
double merit_dderiv(const SdpProblem& prob, const PdalState& st, const PdalEval& ev,
                    const PdResiduals& res, const Vec& dy, const BlockSymMatrix& dx);

struct PdDirection {
  Vec dy;
  BlockSymMatrix dx;
  PcgReport cg;
};

/// ΔX̂ from Δŷ: X̄ − X̂ + X̄ A(Δŷ) Z + Z A(Δŷ) X̄ and the linear analogue.
BlockSymMatrix pd_dual_direction(const SdpProblem& prob, const PdalEval& ev,
                                 const BlockSymMatrix& xhat, const Vec& dy);

PdDirection pd_newton_step(const SdpProblem& prob, const PdalState& st, const PdalEval& ev,
                           const BlockSymMatrix& xhat, const Preconditioner* precond,
                           const PcgOptions& opts);

/// max(err1, err4, |err5|) of the DIMACS measures at (y, X).
double pdal_error(const SdpProblem& prob, const Vec& y, const BlockSymMatrix& x);

/// Returns nullptr for PrecondKind::none.
std::unique_ptr<Preconditioner> build_pdal_preconditioner(const SdpProblem& prob,
                                                          const PdalState& st,
                                                          const PdalEval& ev, PrecondKind kind,
                                                          const RankHints& hints, TauRule rule);

struct PdalIterationView {
  const SdpProblem& prob;
  const PdalState& state;
  const PdalEval& eval;
  const Preconditioner* precond;
};

struct InnerResult {
  Vec y;
  BlockSymMatrix x;
  int iterations = 0;
  int cg = 0;
  bool converged = false;
  bool early = false;
  /// No step passed the line search.
  bool stalled = false;
  double merit = 0.0;
  std::vector<double> merit_trace;
};

/// Newton iterations on the primal-dual system from (ȳ, X), with merit
/// line search and the early-stopping test.
InnerResult inner_solve(const SdpProblem& prob, const PdalState& st, double eps,
                        const PdalConfig& cfg, double cg_tol);

/// π_lin ← max(π_lin_min, π_lin_upd·π_lin),
/// π_lmi ← max(π_lmi_min, π_lmi_upd·π_lmi, 1.01·λ_max).
void penalty_update(PdalState& st, const PdalConfig& cfg, double lambda_max_a);

/// Largest eigenvalue of A_i(y) − C_i over all blocks.
double lmi_lambda_max(const SdpProblem& prob, const Vec& y);

std::pair<PrimalDualPoint, SolveReport> pdal_solve(const SdpProblem& prob,
                                                   const PdalConfig& cfg = PdalConfig::tru());

}  // namespace lorank
