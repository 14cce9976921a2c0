#include "lorank/model.hpp"

#include "lorank/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

namespace lorank {

SdpProblem::SdpProblem(Vec b, std::vector<LmiBlock> blocks, SpMat lin_matrix, Vec lin_rhs)
    : b_(std::move(b)),
      blocks_(std::move(blocks)),
      lin_matrix_(std::move(lin_matrix)),
      lin_rhs_(std::move(lin_rhs)) {
  if (lin_matrix_.rows() == 0 && lin_matrix_.cols() == 0) {
    lin_matrix_.resize(lin_rhs_.size(), b_.size());
  }
  lin_matrix_.makeCompressed();
  validate();
}

void SdpProblem::validate() const {
  const int n = num_vars();
  if (n == 0) throw std::invalid_argument("SdpProblem: no variables");
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    const auto& blk = blocks_[i];
    const std::string where = "SdpProblem: block " + std::to_string(i);
    if (blk.dim <= 0) throw std::invalid_argument(where + " has non-positive size");
    if (static_cast<int>(blk.constraints.size()) != n) {
      throw std::invalid_argument(where + " has " + std::to_string(blk.constraints.size()) +
                                  " constraint matrices, expected " + std::to_string(n));
    }
    if (blk.objective.dim() != blk.dim) {
      throw std::invalid_argument(where + ": objective dimension mismatch");
    }
    bool any = false;
    for (const auto& a : blk.constraints) {
      if (a.dim() != blk.dim) throw std::invalid_argument(where + ": constraint dimension mismatch");
      any = any || !a.empty();
    }
    if (!any) throw std::invalid_argument(where + " has no nonzero constraint matrix");
  }
  if (lin_matrix_.rows() != lin_rhs_.size() || lin_matrix_.cols() != n) {
    throw std::invalid_argument("SdpProblem: linear block has shape " +
                                std::to_string(lin_matrix_.rows()) + "x" +
                                std::to_string(lin_matrix_.cols()) + ", expected " +
                                std::to_string(lin_rhs_.size()) + "x" + std::to_string(n));
  }
  if (blocks_.empty() && lin_rhs_.size() == 0) {
    throw std::invalid_argument("SdpProblem: no cone blocks");
  }
}

int SdpProblem::total_order() const {
  int s = num_lin();
  for (const auto& blk : blocks_) s += blk.dim;
  return s;
}

double SdpProblem::objective_max_abs() const {
  double m = lin_rhs_.size() > 0 ? lin_rhs_.cwiseAbs().maxCoeff() : 0.0;
  for (const auto& blk : blocks_) {
    for (const auto& e : blk.objective.entries()) m = std::max(m, std::abs(e.value));
  }
  return m;
}

Vec SdpProblem::column_norms_sq(int block) const {
  const auto& blk = blocks_[block];
  Vec out(num_vars());
  for (int j = 0; j < num_vars(); ++j) out(j) = blk.constraints[j].frobenius_sq();
  return out;
}

std::vector<std::string> SdpProblem::assumption_warnings() const {
  std::vector<std::string> warn;
  int max_m = 0;
  for (const auto& blk : blocks_) max_m = std::max(max_m, blk.dim);
  if (num_vars() < 2 * max_m) {
    warn.push_back("n = " + std::to_string(num_vars()) +
                   " is not much larger than the largest block size " + std::to_string(max_m) +
                   "; low-rank preconditioners may not pay off");
  }
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    std::size_t nnz = 0;
    for (const auto& a : blocks_[i].constraints) nnz += a.nnz();
    const double dense = 0.5 * blocks_[i].dim * (blocks_[i].dim + 1.0) * num_vars();
    if (dense > 0 && nnz > 0.5 * dense) {
      warn.push_back("block " + std::to_string(i) + " constraint data is dense");
    }
  }
  return warn;
}

BlockSymMatrix BlockSymMatrix::zeros_like(const SdpProblem& prob) {
  BlockSymMatrix m;
  m.blocks.reserve(prob.num_blocks());
  for (int i = 0; i < prob.num_blocks(); ++i) {
    m.blocks.push_back(Mat::Zero(prob.block_dim(i), prob.block_dim(i)));
  }
  m.lin = Vec::Zero(prob.num_lin());
  return m;
}

BlockSymMatrix BlockSymMatrix::identity_like(const SdpProblem& prob, double scale) {
  BlockSymMatrix m;
  m.blocks.reserve(prob.num_blocks());
  for (int i = 0; i < prob.num_blocks(); ++i) {
    m.blocks.push_back(scale * Mat::Identity(prob.block_dim(i), prob.block_dim(i)));
  }
  m.lin = Vec::Constant(prob.num_lin(), scale);
  return m;
}

double BlockSymMatrix::dot(const BlockSymMatrix& other) const {
  double s = lin.size() > 0 ? lin.dot(other.lin) : 0.0;
  for (std::size_t i = 0; i < blocks.size(); ++i) s += frob_dot(blocks[i], other.blocks[i]);
  return s;
}

BlockSymMatrix& BlockSymMatrix::axpy(double alpha, const BlockSymMatrix& x) {
  for (std::size_t i = 0; i < blocks.size(); ++i) blocks[i] += alpha * x.blocks[i];
  if (lin.size() > 0) lin += alpha * x.lin;
  return *this;
}

double DimacsErrors::max() const {
  double m = 0.0;
  for (double e : err) m = std::max(m, std::abs(e));
  return m;
}

Mat block_adjoint(const LmiBlock& block, const Vec& y) {
  Mat m = Mat::Zero(block.dim, block.dim);
  for (Eigen::Index j = 0; j < y.size(); ++j) {
    if (y(j) != 0.0) block.constraints[j].add_to(m, y(j));
  }
  return m;
}

Vec block_apply(const LmiBlock& block, const Mat& m) {
  Vec out(block.constraints.size());
  for (std::size_t j = 0; j < block.constraints.size(); ++j) {
    out(static_cast<Eigen::Index>(j)) = block.constraints[j].dot(m);
  }
  return out;
}

BlockSymMatrix apply_A_adjoint(const SdpProblem& prob, const Vec& y) {
  BlockSymMatrix out;
  out.blocks.resize(prob.num_blocks());
  for_each_index(prob.num_blocks(),
                 [&](int i) { out.blocks[i] = block_adjoint(prob.block(i), y); });
  out.lin = prob.lin_matrix() * y;
  return out;
}

Vec apply_A(const SdpProblem& prob, const BlockSymMatrix& m) {
  std::vector<Vec> parts(prob.num_blocks());
  for_each_index(prob.num_blocks(),
                 [&](int i) { parts[i] = block_apply(prob.block(i), m.blocks[i]); });
  Vec out = Vec::Zero(prob.num_vars());
  for (const auto& p : parts) out += p;
  if (prob.num_lin() > 0) out += prob.lin_matrix().transpose() * m.lin;
  return out;
}

double primal_objective(const SdpProblem& prob, const BlockSymMatrix& x) {
  double s = prob.num_lin() > 0 ? prob.lin_rhs().dot(x.lin) : 0.0;
  for (int i = 0; i < prob.num_blocks(); ++i) s += prob.block(i).objective.dot(x.blocks[i]);
  return s;
}

double dual_objective(const SdpProblem& prob, const Vec& y) { return prob.b().dot(y); }

BlockSymMatrix dual_slack(const SdpProblem& prob, const Vec& y) {
  BlockSymMatrix s = apply_A_adjoint(prob, y);
  for (int i = 0; i < prob.num_blocks(); ++i) {
    s.blocks[i] *= -1.0;
    prob.block(i).objective.add_to(s.blocks[i], 1.0);
  }
  s.lin = prob.lin_rhs() - s.lin;
  return s;
}

namespace {

double cone_violation(const BlockSymMatrix& m) {
  double v = 0.0;
  for (const auto& blk : m.blocks) {
    if (blk.size() == 0) continue;
    v = std::max(v, -sym_eigenvalues(blk)(0));
  }
  if (m.lin.size() > 0) v = std::max(v, -m.lin.minCoeff());
  return std::max(0.0, v);
}

}  // namespace

DimacsErrors dimacs(const SdpProblem& prob, const PrimalDualPoint& pt) {
  const double nb = 1.0 + (prob.b().size() > 0 ? prob.b().cwiseAbs().maxCoeff() : 0.0);
  const double nc = 1.0 + prob.objective_max_abs();

  DimacsErrors e;
  e.err[0] = (apply_A(prob, pt.x) - prob.b()).norm() / nb;
  e.err[1] = cone_violation(pt.x) / nb;

  const BlockSymMatrix slack = dual_slack(prob, pt.y);
  double rd = 0.0;
  for (int i = 0; i < prob.num_blocks(); ++i) {
    rd += (pt.s.blocks[i] - slack.blocks[i]).squaredNorm();
  }
  if (prob.num_lin() > 0) rd += (pt.s.lin - slack.lin).squaredNorm();
  e.err[2] = std::sqrt(rd) / nc;
  e.err[3] = cone_violation(pt.s) / nc;

  const double pobj = primal_objective(prob, pt.x);
  const double dobj = dual_objective(prob, pt.y);
  const double denom = 1.0 + std::abs(pobj) + std::abs(dobj);
  e.err[4] = std::abs(pobj - dobj) / denom;
  e.err[5] = pt.x.dot(pt.s) / denom;
  return e;
}

}  // namespace lorank
