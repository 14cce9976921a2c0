#pragma once

#include "lorank/linalg.hpp"

#include <vector>

namespace lorank {

enum class TauRule {
  /// τ = λ_1 + 0.5·mean(λ_1..λ_{m−k})
  loraine,
  /// τ = λ_1
  lambda_min,
};

/// W = W0 + U·Uᵀ with the k largest eigenvalues moved into U.
struct SplitBlock {
  Mat w0;
  Mat u;
  double tau = 0.0;
  int k = 0;
  /// λ_min(W0) = min(λ_1(W), τ)
  double w0_min = 0.0;
  /// τ was pulled below λ_{m−k} because the requested value left no gap.
  bool degenerate = false;
};

double tau_loraine(const Vec& eigs_ascending, int k);

SplitBlock spectral_split(const EigDecomp& eig, int k, double tau);
SplitBlock spectral_split(const EigDecomp& eig, int k, TauRule rule);
SplitBlock spectral_split(const Mat& w, int k, TauRule rule = TauRule::loraine);

/// Number of eigenvalues above 100 × median, clamped to [1, m−1].
int auto_rank(const Vec& eigs_ascending);

/// Expected outlier count per block.
struct RankHints {
  std::vector<int> k;
  bool auto_detect = false;

  int for_block(int i, const Vec& eigs_ascending) const;
};

}  // namespace lorank
