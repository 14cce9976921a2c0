#pragma once

#include "lorank/model.hpp"
#include "lorank/pcg.hpp"
#include "lorank/spectral_split.hpp"

#include <Eigen/Cholesky>
#include <Eigen/SparseCholesky>

#include <memory>
#include <string>
#include <vector>

namespace lorank {

enum class PrecondKind { none, alpha, beta, hybrid, tilde, gamma, delta };

std::string to_string(PrecondKind kind);
/// Throws std::invalid_argument on an unknown name.
PrecondKind parse_precond_kind(const std::string& name);
bool usable_by_ip(PrecondKind kind);
bool usable_by_pdal(PrecondKind kind);

class Preconditioner {
 public:
  virtual ~Preconditioner() = default;
  virtual int dim() const = 0;
  /// out = P⁻¹ v
  virtual void apply_inv(const Vec& v, Vec& out) const = 0;
  /// Dense P, for diagnostics on small problems.
  virtual Mat dense() const = 0;

  Vec apply_inv(const Vec& v) const {
    Vec out(dim());
    apply_inv(v, out);
    return out;
  }
  /// The returned operator refers to *this.
  LinOp inverse_op() const;
};

class DiagonalPreconditioner : public Preconditioner {
 public:
  /// Throws std::invalid_argument if any entry is not positive.
  explicit DiagonalPreconditioner(Vec diag);

  int dim() const override { return static_cast<int>(diag_.size()); }
  using Preconditioner::apply_inv;
  void apply_inv(const Vec& v, Vec& out) const override;
  Mat dense() const override;
  const Vec& diagonal() const { return diag_; }

 private:
  Vec diag_;
};

using SpMatC = Eigen::SparseMatrix<double>;

/// P = A + Ṽ·Ṽᵀ applied through the Sherman-Morrison-Woodbury identity,
/// P⁻¹v = A⁻¹(v − Ṽ·Θ⁻¹·Ṽᵀ·A⁻¹v) with Θ = I + Ṽᵀ·A⁻¹·Ṽ.
class SmwPreconditioner : public Preconditioner {
 public:
  SmwPreconditioner(Vec base_diag, Mat low_rank);
  /// Sparse SPD base, factored once here.
  SmwPreconditioner(const SpMatC& base, Mat low_rank);

  int dim() const override { return static_cast<int>(v_.rows()); }
  using Preconditioner::apply_inv;
  void apply_inv(const Vec& v, Vec& out) const override;
  Mat dense() const override;

  const Mat& low_rank() const { return v_; }
  int rank() const { return static_cast<int>(v_.cols()); }
  bool sparse_base() const { return static_cast<bool>(sparse_); }
  const Vec& base_diag() const { return diag_; }
  const Mat& theta() const { return theta_mat_; }

 private:
  void base_solve(const Vec& v, Vec& out) const;
  void factor_theta();

  Vec diag_;
  SpMatC base_;
  std::shared_ptr<Eigen::SimplicialLLT<SpMatC>> sparse_;
  Mat v_;
  Mat ainv_v_;
  Mat theta_mat_;
  Eigen::LLT<Mat> theta_;
};

/// Factor F with F·Fᵀ = M for symmetric positive semidefinite M; Cholesky
/// when it succeeds, otherwise the eigenvalue square root.
Mat psd_factor(const Mat& m);

/// n × (left.cols()·right.cols()) matrix whose row j holds
/// scale · left_aᵀ A_j right_b at column a·right.cols() + b.
Mat sandwich_factor(const LmiBlock& block, const Mat& left, const Mat& right, double scale = 1.0);

/// Ṽ of H_α: blocks 𝐀_iᵀ(U_i ⊗ Γ_i) with Γ_iΓ_iᵀ = 2W0_i + U_iU_iᵀ.
Mat alpha_factor(const SdpProblem& prob, const std::vector<SplitBlock>& splits);
/// Στ_i² + lin_diag
Vec alpha_base(int n, const std::vector<SplitBlock>& splits, const Vec& lin_diag);

SmwPreconditioner build_h_alpha(const SdpProblem& prob, const std::vector<SplitBlock>& splits,
                                const Vec& lin_diag);
DiagonalPreconditioner build_h_beta(int n, const std::vector<SplitBlock>& splits,
                                    const Vec& lin_diag);

/// Σ w_i·𝐀_iᵀ𝐀_i + diag(d) as a sparse matrix.
SpMatC gram_base(const SdpProblem& prob, const std::vector<double>& weights, const Vec& d);

SmwPreconditioner build_h_tilde(const SdpProblem& prob, const std::vector<SplitBlock>& splits,
                                const Vec& lin_diag);

/// τ_i^{(1)} = 10·max(0, λ_min(W0_i)), τ_i^{(2)} = mean eigenvalue of v_mats[i].
std::vector<double> gamma_weights(const std::vector<SplitBlock>& w_splits,
                                  const std::vector<Mat>& v_mats);
/// h_lin + Σ τ^{(1)}τ^{(2)}·diag(𝐀_iᵀ𝐀_i)
Vec gamma_base(const SdpProblem& prob, const std::vector<double>& weights, const Vec& h_lin);
/// √2·𝐀_iᵀ(W̃_i ⊗ Δ_i) with Δ_iΔ_iᵀ = V_i.
Mat gamma_factor(const SdpProblem& prob, const std::vector<SplitBlock>& w_splits,
                 const std::vector<Mat>& v_mats);
/// √2·𝐀_iᵀ[(W̃_i ⊗ Θ_i), (Ṽ_i ⊗ Γ_i)] with Γ_iΓ_iᵀ = W0_i + ½W̃_iW̃_iᵀ and
/// Θ_iΘ_iᵀ = V0_i + ½Ṽ_iṼ_iᵀ.
Mat delta_factor(const SdpProblem& prob, const std::vector<SplitBlock>& w_splits,
                 const std::vector<SplitBlock>& v_splits);

SmwPreconditioner build_h_gamma(const SdpProblem& prob, const std::vector<SplitBlock>& w_splits,
                                const std::vector<Mat>& v_mats, const Vec& h_lin);
SmwPreconditioner build_h_delta(const SdpProblem& prob, const std::vector<SplitBlock>& w_splits,
                                const std::vector<SplitBlock>& v_splits, const Vec& h_lin);

/// N_cg > k·p·√n/10 and iter > √n/60, iter counted from 1.
bool hybrid_should_switch(int n, int p, int k, int iter, int last_cg_count);

}  // namespace lorank
