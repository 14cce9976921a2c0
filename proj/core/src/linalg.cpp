#include "lorank/linalg.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <cmath>
#include <utility>

namespace lorank {

Vec CholFactor::solve(const Vec& b) const {
  Vec x = lower.triangularView<Eigen::Lower>().solve(b);
  lower.transpose().triangularView<Eigen::Upper>().solveInPlace(x);
  return x;
}

Mat CholFactor::congruence_inverse(const Mat& m) const {
  Mat t = lower.triangularView<Eigen::Lower>().solve(m);
  Mat r = lower.triangularView<Eigen::Lower>().solve(t.transpose());
  return symmetrize(r);
}

EigDecomp sym_eig(const Mat& a) {
  Eigen::SelfAdjointEigenSolver<Mat> es(a, Eigen::ComputeEigenvectors);
  if (es.info() != Eigen::Success) {
    throw std::runtime_error("symmetric eigensolver did not converge (dim " +
                             std::to_string(a.rows()) + ")");
  }
  return {es.eigenvalues(), es.eigenvectors()};
}

Vec sym_eigenvalues(const Mat& a) {
  Eigen::SelfAdjointEigenSolver<Mat> es(a, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) {
    throw std::runtime_error("symmetric eigensolver did not converge (dim " +
                             std::to_string(a.rows()) + ")");
  }
  return es.eigenvalues();
}

CholFactor chol(const Mat& a) {
  Eigen::LLT<Mat> llt(a);
  if (llt.info() == Eigen::Success) {
    Mat l = llt.matrixL();
    if (l.allFinite()) return {std::move(l)};
  }
  // Re-run the unblocked recurrence to locate the failing pivot.
  const Eigen::Index m = a.rows();
  Mat l = Mat::Zero(m, m);
  for (Eigen::Index j = 0; j < m; ++j) {
    const double d = a(j, j) - l.row(j).head(j).squaredNorm();
    if (!(d > 0.0) || !std::isfinite(d)) {
      throw NotPositiveDefinite(static_cast<int>(j));
    }
    l(j, j) = std::sqrt(d);
    for (Eigen::Index i = j + 1; i < m; ++i) {
      l(i, j) = (a(i, j) - l.row(i).head(j).dot(l.row(j).head(j))) / l(j, j);
    }
  }
  // LLT failed on round-off the unblocked pass tolerated; report the last pivot.
  throw NotPositiveDefinite(static_cast<int>(m - 1));
}

double min_eig_pencil(const Mat& x, const Mat& dx) {
  const CholFactor f = chol(x);
  return sym_eigenvalues(f.congruence_inverse(dx))(0);
}

Mat symmetrize(const Mat& a) { return 0.5 * (a + a.transpose()); }

double frob_dot(const Mat& a, const Mat& b) {
  return a.cwiseProduct(b).sum();
}

int numerical_rank(const Vec& eigenvalues, double rel) {
  if (eigenvalues.size() == 0) return 0;
  const double top = eigenvalues.cwiseAbs().maxCoeff();
  if (top == 0.0) return 0;
  int r = 0;
  for (Eigen::Index i = 0; i < eigenvalues.size(); ++i) {
    if (std::abs(eigenvalues(i)) > rel * top) ++r;
  }
  return r;
}

Vec singular_values(const Mat& a) {
  Eigen::JacobiSVD<Mat> svd(a);
  return svd.singularValues();
}

Mat spd_sqrt(const Mat& a) {
  const EigDecomp e = sym_eig(a);
  const Vec s = e.values.cwiseMax(0.0).cwiseSqrt();
  return e.vectors * s.asDiagonal() * e.vectors.transpose();
}

}  // namespace lorank
