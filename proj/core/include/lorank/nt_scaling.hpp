#pragma once

#include "lorank/linalg.hpp"

namespace lorank {

/// Nesterov-Todd scaling of one block: W·S·W = X, W = G·Gᵀ, and
/// Gᵀ·S·G = G⁻¹·X·G⁻ᵀ = diag(d).
struct NtScaling {
  Mat w;
  Mat g;
  Mat g_inv;
  Vec d;

  /// S⁻¹ = G·diag(d)⁻¹·Gᵀ
  Mat s_inverse() const;
};

/// From X = LLᵀ, S = RRᵀ and the SVD RᵀL = UΣVᵀ: G = L·V·Σ^{-1/2}.
/// Throws NotPositiveDefinite if X or S is not positive definite.
NtScaling nt_scaling(const Mat& x, const Mat& s);

/// R_NT = −(G⁻¹·δX·δS·G + Gᵀ·δS·δX·G⁻ᵀ) ./ (d·eᵀ + e·dᵀ)
Mat second_order_correction(const NtScaling& nt, const Mat& dx, const Mat& ds);

}  // namespace lorank
