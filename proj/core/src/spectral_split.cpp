#include "lorank/spectral_split.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lorank {

double tau_loraine(const Vec& eigs, int k) {
  const int m = static_cast<int>(eigs.size());
  if (k >= m) throw std::invalid_argument("tau_loraine: k must be below the block size");
  return eigs(0) + 0.5 * eigs.head(m - k).mean();
}

SplitBlock spectral_split(const EigDecomp& eig, int k, double tau) {
  const int m = static_cast<int>(eig.values.size());
  if (k < 0 || k >= m) throw std::invalid_argument("spectral_split: need 0 <= k < dim");
  SplitBlock s;
  s.k = k;
  s.tau = tau;
  if (k == 0) {
    s.w0 = eig.vectors * eig.values.asDiagonal() * eig.vectors.transpose();
    s.u = Mat::Zero(m, 0);
    s.w0_min = eig.values(0);
    return s;
  }
  const double edge = eig.values(m - k - 1);
  if (s.tau >= edge) {
    s.tau = edge * (1.0 - 1e-8);
    s.degenerate = true;
  }
  Vec lam0 = eig.values;
  lam0.tail(k).setConstant(s.tau);
  s.w0 = eig.vectors * lam0.asDiagonal() * eig.vectors.transpose();
  s.w0 = symmetrize(s.w0);
  const Vec top = (eig.values.tail(k).array() - s.tau).max(0.0).sqrt();
  s.u = eig.vectors.rightCols(k) * top.asDiagonal();
  s.w0_min = std::min(eig.values(0), s.tau);
  return s;
}

SplitBlock spectral_split(const EigDecomp& eig, int k, TauRule rule) {
  const double tau = rule == TauRule::loraine ? tau_loraine(eig.values, k) : eig.values(0);
  return spectral_split(eig, k, tau);
}

SplitBlock spectral_split(const Mat& w, int k, TauRule rule) {
  return spectral_split(sym_eig(w), k, rule);
}

int auto_rank(const Vec& eigs) {
  const int m = static_cast<int>(eigs.size());
  if (m < 2) return 0;
  const double median =
      m % 2 ? eigs(m / 2) : 0.5 * (eigs(m / 2 - 1) + eigs(m / 2));
  int k = 0;
  for (int i = 0; i < m; ++i) {
    if (eigs(i) > 100.0 * median) ++k;
  }
  return std::clamp(k, 1, m - 1);
}

int RankHints::for_block(int i, const Vec& eigs) const {
  const int m = static_cast<int>(eigs.size());
  int kk = 1;
  if (auto_detect) {
    kk = auto_rank(eigs);
  } else if (i < static_cast<int>(k.size())) {
    kk = k[i];
  }
  return std::clamp(kk, m > 1 ? 1 : 0, std::max(0, m - 1));
}

}  // namespace lorank
