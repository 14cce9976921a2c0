#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace lorank {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Thrown when a Cholesky factorization meets a nonpositive pivot.
class NotPositiveDefinite : public std::runtime_error {
 public:
  explicit NotPositiveDefinite(int pivot)
      : std::runtime_error("matrix is not positive definite (pivot " +
                           std::to_string(pivot) + ")"),
        pivot_(pivot) {}
  int pivot() const noexcept { return pivot_; }

 private:
  int pivot_;
};

/// Eigenvalues in ascending order with matching orthonormal eigenvector columns.
struct EigDecomp {
  Vec values;
  Mat vectors;
};

/// Lower-triangular L with A = L Lᵀ.
struct CholFactor {
  Mat lower;

  int dim() const { return static_cast<int>(lower.rows()); }
  /// Solves A x = b.
  Vec solve(const Vec& b) const;
  /// Returns L⁻¹ M L⁻ᵀ for a symmetric M.
  Mat congruence_inverse(const Mat& m) const;
};

/// Symmetric eigendecomposition (Householder tridiagonalization followed by
/// implicit-shift QR). Throws std::runtime_error on non-convergence.
EigDecomp sym_eig(const Mat& a);

/// Eigenvalues only, ascending.
Vec sym_eigenvalues(const Mat& a);

CholFactor chol(const Mat& a);

/// λ_min(x⁻¹·dx) for x positive definite, via λ_min(L⁻¹·dx·L⁻ᵀ).
double min_eig_pencil(const Mat& x, const Mat& dx);

/// (a + aᵀ)/2.
Mat symmetrize(const Mat& a);

/// Frobenius inner product tr(aᵀb).
double frob_dot(const Mat& a, const Mat& b);

/// Number of eigenvalues whose magnitude exceeds rel·max|λ|.
int numerical_rank(const Vec& eigenvalues, double rel = 1e-8);

/// Singular values of a general matrix, descending.
Vec singular_values(const Mat& a);

/// Symmetric positive definite square root through the eigendecomposition.
Mat spd_sqrt(const Mat& a);

}  // namespace lorank
