#pragma once

#include "lorank/model.hpp"
#include "lorank/nt_scaling.hpp"
#include "lorank/pcg.hpp"
#include "lorank/precond.hpp"
#include "lorank/report.hpp"
#include "lorank/spectral_split.hpp"

#include <functional>
#include <memory>
#include <utility>
#include <vector>

namespace lorank {

struct IpState {
  PrimalDualPoint point;
  std::vector<NtScaling> nt;
  /// x_lin ./ s_lin
  Vec lin_ratio;
  double mu = 0.0;
  int iter = 0;
};

/// Primal, dual and linear-dual residuals at a point.
struct IpResiduals {
  /// b − A(X) − Dᵀx_lin
  Vec rp;
  /// Blocks C − S − A*(y); lin holds d − s_lin − D·y.
  BlockSymMatrix rd;
};

struct IpDirections {
  Vec dy;
  BlockSymMatrix dx;
  BlockSymMatrix ds;
};

struct IpIterationView {
  const SdpProblem& prob;
  const IpState& state;
  const Preconditioner* precond;
  PrecondKind kind;
};

struct IpConfig {
  double tau_frac = 0.9;
  double sigma_exponent = 3.0;
  double eps_dimacs = 1e-5;
  int maxiter = 200;
  PrecondKind precond = PrecondKind::hybrid;
  RankHints rank;
  TauRule tau_rule = TauRule::loraine;
  CgTolerance cg_tol;
  int cg_maxiter = 100000;
  bool verbose = false;
  /// Called once per iteration after scaling and preconditioner setup.
  std::function<void(const IpIterationView&)> observer;
};

/// (Σ X_i•S_i + x_linᵀs_lin) / (Σ m_i + ν)
double complementarity_mu(const SdpProblem& prob, const PrimalDualPoint& pt);

/// Scaled identity start, y = 0.
PrimalDualPoint ip_initial_point(const SdpProblem& prob);

IpState make_ip_state(const SdpProblem& prob, PrimalDualPoint pt, int iter = 0);
IpResiduals ip_residuals(const SdpProblem& prob, const PrimalDualPoint& pt);

/// H·dy with H = Σ 𝐀_iᵀ(W_i ⊗ W_i)𝐀_i + Dᵀ·diag(x_lin/s_lin)·D.
Vec schur_matvec(const SdpProblem& prob, const IpState& state, const Vec& dy);
LinOp schur_operator(const SdpProblem& prob, const IpState& state);
/// diag(Dᵀ·diag(x_lin/s_lin)·D)
Vec schur_lin_diag(const SdpProblem& prob, const IpState& state);

Vec rhs_predictor(const SdpProblem& prob, const IpState& state, const IpResiduals& res);
/// `pred` holds the predictor directions δX, δS.
Vec rhs_corrector(const SdpProblem& prob, const IpState& state, const IpResiduals& res,
                  double sigma, double mu, const IpDirections& pred);

/// ΔS, ΔX (and the linear parts) from Δy. Without `pred` this is the
/// predictor (σ = 0, no second-order term).
IpDirections recover_directions(const SdpProblem& prob, const IpState& state,
                                const IpResiduals& res, const Vec& dy, double sigma, double mu,
                                const IpDirections* pred);

/// (α, β) fraction-to-boundary step lengths, capped at 1.
std::pair<double, double> step_lengths(const IpState& state, const IpDirections& dir,
                                       double tau_frac);

/// Per-block spectral splits of the NT matrices W_i.
std::vector<SplitBlock> ip_splits(const IpState& state, const RankHints& hints, TauRule rule);

/// Returns nullptr for PrecondKind::none. Hybrid is resolved by the caller.
std::unique_ptr<Preconditioner> build_ip_preconditioner(const SdpProblem& prob,
                                                        const IpState& state, PrecondKind kind,
                                                        const RankHints& hints, TauRule rule);

std::pair<PrimalDualPoint, SolveReport> ip_solve(const SdpProblem& prob, const IpConfig& cfg = {});

}  // namespace lorank
