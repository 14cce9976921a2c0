#pragma once

#include "lorank/model.hpp"

#include <stdexcept>
#include <vector>

namespace lorank {

/// Argument outside the penalty domain (e.g. A(y) ⊀ πI).
class DomainViolation : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

enum class PenaltyKind {
  /// −log(1 − t) up to τ_q, quadratic Taylor extrapolation beyond.
  qlog,
  /// t / (1 − t)
  hyperbolic,
};

/// Increasing, φ(0) = 0, φ′(0) = 1, barrier as t ↑ 1.
struct PenaltyFn {
  PenaltyKind kind = PenaltyKind::qlog;
  double tau_q = 0.9;
};

struct PenaltyValue {
  double value = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
};

/// φ_π(t) = π·φ(t/π) and its first two derivatives in t.
PenaltyValue penalty_eval(const PenaltyFn& fn, double t, double pi);

/// A_i(y) − C_i = Σ y_j A_j^{(i)} − C_i
Mat lmi_value(const LmiBlock& block, const Vec& y);

/// Z = (πI − A)⁻¹ for the block value A = A_i(y). Throws DomainViolation
/// unless πI − A is positive definite.
Mat z_matrix(const Mat& a_of_y, double pi);

/// X̄ = π²·Z·X·Z
Mat multiplier_update_lmi(const Mat& z, const Mat& x, double pi);

/// x_l·φ′_π((D y − d)_l)
Vec multiplier_update_lin(const SdpProblem& prob, const Vec& y, const Vec& x_lin, double pi,
                          const PenaltyFn& fn);

}  // namespace lorank
