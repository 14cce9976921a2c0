#include "lorank/nt_scaling.hpp"

#include <Eigen/SVD>

#include <stdexcept>

namespace lorank {

Mat NtScaling::s_inverse() const {
  return symmetrize(g * d.cwiseInverse().asDiagonal() * g.transpose());
}

NtScaling nt_scaling(const Mat& x, const Mat& s) {
  const CholFactor lx = chol(x);
  const CholFactor rs = chol(s);
  const Mat rtl = rs.lower.transpose() * lx.lower;
  Eigen::JacobiSVD<Mat> svd(rtl, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vec sig = svd.singularValues();
  if (!(sig.minCoeff() > 0.0)) throw NotPositiveDefinite(0);
  const Vec isq = sig.cwiseSqrt().cwiseInverse();
  NtScaling nt;
  nt.d = sig;
  nt.g = lx.lower * svd.matrixV() * isq.asDiagonal();
  // G⁻¹ = Σ^{1/2}·Vᵀ·L⁻¹
  const Mat linv = lx.lower.triangularView<Eigen::Lower>().solve(
      Mat::Identity(x.rows(), x.cols()));
  nt.g_inv = sig.cwiseSqrt().asDiagonal() * svd.matrixV().transpose() * linv;
  nt.w = symmetrize(nt.g * nt.g.transpose());
  return nt;
}

Mat second_order_correction(const NtScaling& nt, const Mat& dx, const Mat& ds) {
  const Eigen::Index m = nt.d.size();
  for (Eigen::Index i = 0; i < m; ++i) {
    if (!(nt.d(i) > 0.0)) throw std::domain_error("NT scaling has a zero diagonal entry");
  }
  const Mat t = nt.g_inv * dx * ds * nt.g;
  Mat r = -(t + t.transpose());
  for (Eigen::Index j = 0; j < m; ++j) {
    for (Eigen::Index i = 0; i < m; ++i) r(i, j) /= nt.d(i) + nt.d(j);
  }
  return r;
}

}  // namespace lorank
