#pragma once

#include "lorank/ip.hpp"
#include "lorank/pdal.hpp"

#include <vector>

namespace lorank {

/// Dense diagnostics are limited to problems with at most this many variables.
inline constexpr int kDiagnosticMaxVars = 400;

/// m² × n matrix whose column j is vec(A_j^{(i)}).
Mat vec_constraints(const LmiBlock& block);

/// 𝐀ᵀ(L ⊗ R)𝐀 entrywise: entry (j, l) = tr(A_j·L·A_l·R).
Mat kron_congruence(const LmiBlock& block, const Mat& left, const Mat& right);

/// Dᵀ·diag(w)·D
Mat lin_congruence(const SdpProblem& prob, const Vec& w);

/// Σ 𝐀_iᵀ(W_i ⊗ W_i)𝐀_i + Dᵀ·diag(x_lin/s_lin)·D
Mat dense_schur(const SdpProblem& prob, const IpState& st);

/// rI + 2Σ 𝐀_iᵀ(X̄_i ⊗ Z_i)𝐀_i + DᵀW̄D
Mat dense_pdal_hessian(const SdpProblem& prob, const PdalState& st, const PdalEval& ev);

/// Spectrum of P^{-1/2}·M·P^{-1/2}, ascending. P must be positive definite.
Vec pencil_eigenvalues(const Mat& m, const Mat& p);

/// λ_max/λ_min of P^{-1/2}·H·P^{-1/2}.
double preconditioned_condition(const Mat& h, const Mat& p);

/// Smallest eigenvalue of a dense penalty-solver Hessian against the floor r.
/// The slack is the backward error of the symmetric eigensolver, 10·ε·‖H‖₂.
struct HessianFloor {
  double lambda_min = 0.0;
  double r = 0.0;
  double norm = 0.0;
  double slack = 0.0;
  bool holds() const { return lambda_min >= r - slack; }
};

HessianFloor hessian_floor(const Mat& h, double r);

struct ConditionBound {
  double kappa = 0.0;
  /// (1 + Σε̄)/(1 + Σε̲); +inf when the denominator is not positive.
  double bound = 0.0;
  std::vector<double> eps_upper;
  std::vector<double> eps_lower;
  bool holds(double rel_slack = 1e-8) const { return kappa <= bound * (1.0 + rel_slack); }
};

/// Compares κ(H_α^{-1/2} H H_α^{-1/2}) against the perturbation bound built
/// from B_i = 𝐀_iᵀ(W0_i ⊗ W0_i)𝐀_i and B̃_i = τ_i²I. The off-diagonal part of
/// the linear term enters as one more perturbation.
ConditionBound alpha_condition_bound(const SdpProblem& prob, const IpState& st,
                                     const std::vector<SplitBlock>& splits);

}  // namespace lorank
