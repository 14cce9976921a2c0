#pragma once

#include "lorank/linalg.hpp"
#include "lorank/sparse_sym.hpp"

#include <Eigen/SparseCore>

#include <array>
#include <string>
#include <vector>

namespace lorank {

using SpMat = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// One LMI block: objective C_i and the constraint matrices A_j^{(i)}, j < n.
struct LmiBlock {
  int dim = 0;
  SparseSym objective;
  std::vector<SparseSym> constraints;
};

/// Multi-block linear SDP
///
///   min  Σ C_i • X_i + dᵀ x_lin   s.t.  Σ A_j^{(i)} • X_i + (Dᵀ x_lin)_j = b_j,
///        X_i ⪰ 0, x_lin ≥ 0
///
/// together with its dual in y,
///
///   max  bᵀ y   s.t.  C_i − Σ y_j A_j^{(i)} ⪰ 0,  d − D y ≥ 0.
///
/// The penalty solver reads the same data as A^lmi(y) = Σ y_j A_j − C ⪯ 0.
class SdpProblem {
 public:
  SdpProblem() = default;
  SdpProblem(Vec b, std::vector<LmiBlock> blocks, SpMat lin_matrix, Vec lin_rhs);

  int num_vars() const { return static_cast<int>(b_.size()); }
  int num_blocks() const { return static_cast<int>(blocks_.size()); }
  int num_lin() const { return static_cast<int>(lin_rhs_.size()); }
  int block_dim(int i) const { return blocks_[i].dim; }
  /// Σ m_i + ν, the order of the complementarity product.
  int total_order() const;

  const Vec& b() const { return b_; }
  const LmiBlock& block(int i) const { return blocks_[i]; }
  const std::vector<LmiBlock>& blocks() const { return blocks_; }
  const SpMat& lin_matrix() const { return lin_matrix_; }
  const Vec& lin_rhs() const { return lin_rhs_; }

  /// Largest absolute entry over all C_i and d.
  double objective_max_abs() const;

  /// Squared Frobenius norms of the columns of 𝐀_i (one entry per j).
  Vec column_norms_sq(int block) const;

  /// Soft checks (e.g. n ≫ max m_i); returns human-readable warnings.
  std::vector<std::string> assumption_warnings() const;

 private:
  void validate() const;

  Vec b_;
  std::vector<LmiBlock> blocks_;
  SpMat lin_matrix_;
  Vec lin_rhs_;
};

/// Block-diagonal symmetric matrix: dense LMI blocks plus a diagonal part.
struct BlockSymMatrix {
  std::vector<Mat> blocks;
  Vec lin;

  static BlockSymMatrix zeros_like(const SdpProblem& prob);
  static BlockSymMatrix identity_like(const SdpProblem& prob, double scale = 1.0);

  double dot(const BlockSymMatrix& other) const;
  BlockSymMatrix& axpy(double alpha, const BlockSymMatrix& x);
};

struct PrimalDualPoint {
  Vec y;
  BlockSymMatrix x;
  BlockSymMatrix s;
};

/// Six normalized DIMACS error measures.
struct DimacsErrors {
  std::array<double, 6> err{};

  double max() const;
  bool satisfied(double tol) const { return max() <= tol; }
};

/// Blocks Σ_j y_j A_j^{(i)}; diagonal part D y.
BlockSymMatrix apply_A_adjoint(const SdpProblem& prob, const Vec& y);
/// Component j: Σ_i A_j^{(i)} • M_i + (Dᵀ m_lin)_j.
Vec apply_A(const SdpProblem& prob, const BlockSymMatrix& m);

/// Σ_j y_j A_j^{(i)} for one block.
Mat block_adjoint(const LmiBlock& block, const Vec& y);
/// (A_j^{(i)} • M)_j for one block.
Vec block_apply(const LmiBlock& block, const Mat& m);

/// C•X + dᵀx_lin
double primal_objective(const SdpProblem& prob, const BlockSymMatrix& x);
/// bᵀy
double dual_objective(const SdpProblem& prob, const Vec& y);

/// Dual slack C − A*(y), d − D y.
BlockSymMatrix dual_slack(const SdpProblem& prob, const Vec& y);

DimacsErrors dimacs(const SdpProblem& prob, const PrimalDualPoint& pt);

}  // namespace lorank
