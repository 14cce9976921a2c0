#include "lorank/precond.hpp"

#include "lorank/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace lorank {

std::string to_string(PrecondKind kind) {
  switch (kind) {
    case PrecondKind::none: return "none";
    case PrecondKind::alpha: return "alpha";
    case PrecondKind::beta: return "beta";
    case PrecondKind::hybrid: return "hybrid";
    case PrecondKind::tilde: return "tilde";
    case PrecondKind::gamma: return "gamma";
    case PrecondKind::delta: return "delta";
  }
  return "?";
}

PrecondKind parse_precond_kind(const std::string& name) {
  for (auto k : {PrecondKind::none, PrecondKind::alpha, PrecondKind::beta, PrecondKind::hybrid,
                 PrecondKind::tilde, PrecondKind::gamma, PrecondKind::delta}) {
    if (to_string(k) == name) return k;
  }
  throw std::invalid_argument("unknown preconditioner '" + name + "'");
}

bool usable_by_ip(PrecondKind kind) {
  return kind != PrecondKind::gamma && kind != PrecondKind::delta;
}

bool usable_by_pdal(PrecondKind kind) {
  return kind != PrecondKind::alpha && kind != PrecondKind::hybrid;
}

LinOp Preconditioner::inverse_op() const {
  return {dim(), [this](const Vec& x, Vec& y) { apply_inv(x, y); }};
}

DiagonalPreconditioner::DiagonalPreconditioner(Vec diag) : diag_(std::move(diag)) {
  for (Eigen::Index i = 0; i < diag_.size(); ++i) {
    if (!(diag_(i) > 0.0) || !std::isfinite(diag_(i))) {
      throw std::invalid_argument("diagonal preconditioner entry " + std::to_string(i) +
                                  " is not positive");
    }
  }
}

void DiagonalPreconditioner::apply_inv(const Vec& v, Vec& out) const {
  out = v.cwiseQuotient(diag_);
}

Mat DiagonalPreconditioner::dense() const { return diag_.asDiagonal(); }

SmwPreconditioner::SmwPreconditioner(Vec base_diag, Mat low_rank)
    : diag_(std::move(base_diag)), v_(std::move(low_rank)) {
  for (Eigen::Index i = 0; i < diag_.size(); ++i) {
    if (!(diag_(i) > 0.0) || !std::isfinite(diag_(i))) {
      throw std::invalid_argument("SMW base entry " + std::to_string(i) + " is not positive");
    }
  }
  if (v_.rows() != diag_.size()) v_.resize(diag_.size(), 0);
  ainv_v_ = diag_.cwiseInverse().asDiagonal() * v_;
  factor_theta();
}

SmwPreconditioner::SmwPreconditioner(const SpMatC& base, Mat low_rank)
    : base_(base), v_(std::move(low_rank)) {
  sparse_ = std::make_shared<Eigen::SimplicialLLT<SpMatC>>(base_);
  if (sparse_->info() != Eigen::Success) {
    throw std::runtime_error("sparse base factorization failed");
  }
  diag_ = base_.diagonal();
  if (v_.rows() != base_.rows()) v_.resize(base_.rows(), 0);
  ainv_v_ = sparse_->solve(v_);
  factor_theta();
}

void SmwPreconditioner::factor_theta() {
  theta_mat_ = Mat::Identity(v_.cols(), v_.cols());
  if (v_.cols() == 0) return;
  theta_mat_.noalias() += v_.transpose() * ainv_v_;
  theta_mat_ = symmetrize(theta_mat_);
  theta_.compute(theta_mat_);
  if (theta_.info() != Eigen::Success) {
    throw NotPositiveDefinite(0);
  }
}

void SmwPreconditioner::base_solve(const Vec& v, Vec& out) const {
  if (sparse_) {
    out = sparse_->solve(v);
  } else {
    out = v.cwiseQuotient(diag_);
  }
}

void SmwPreconditioner::apply_inv(const Vec& v, Vec& out) const {
  base_solve(v, out);
  if (v_.cols() == 0) return;
  const Vec w = theta_.solve(v_.transpose() * out);
  out.noalias() -= ainv_v_ * w;
}

Mat SmwPreconditioner::dense() const {
  Mat p = sparse_ ? Mat(base_) : Mat(diag_.asDiagonal());
  p.noalias() += v_ * v_.transpose();
  return p;
}

Mat psd_factor(const Mat& m) {
  Eigen::LLT<Mat> llt(m);
  if (llt.info() == Eigen::Success) {
    Mat l = llt.matrixL();
    if (l.allFinite()) return l;
  }
  const EigDecomp e = sym_eig(m);
  return e.vectors * e.values.cwiseMax(0.0).cwiseSqrt().asDiagonal();
}

Mat sandwich_factor(const LmiBlock& block, const Mat& left, const Mat& right, double scale) {
  const int n = static_cast<int>(block.constraints.size());
  const Eigen::Index cols = left.cols() * right.cols();
  Mat out(n, cols);
  if (cols == 0) return out;
  std::vector<double> row(cols);
  for (int j = 0; j < n; ++j) {
    block.constraints[j].sandwich_row(left, right, row.data());
    for (Eigen::Index c = 0; c < cols; ++c) out(j, c) = scale * row[c];
  }
  return out;
}

namespace {

Mat hconcat(const std::vector<Mat>& parts, int n) {
  Eigen::Index cols = 0;
  for (const auto& p : parts) cols += p.cols();
  Mat out(n, cols);
  Eigen::Index c = 0;
  for (const auto& p : parts) {
    out.middleCols(c, p.cols()) = p;
    c += p.cols();
  }
  return out;
}

}  // namespace

Mat alpha_factor(const SdpProblem& prob, const std::vector<SplitBlock>& splits) {
  std::vector<Mat> parts(prob.num_blocks());
  for_each_index(prob.num_blocks(), [&](int i) {
    const auto& s = splits[i];
    if (s.u.cols() == 0) {
      parts[i] = Mat(prob.num_vars(), 0);
      return;
    }
    const Mat gamma = psd_factor(2.0 * s.w0 + s.u * s.u.transpose());
    parts[i] = sandwich_factor(prob.block(i), s.u, gamma);
  });
  return hconcat(parts, prob.num_vars());
}

Vec alpha_base(int n, const std::vector<SplitBlock>& splits, const Vec& lin_diag) {
  double t2 = 0.0;
  for (const auto& s : splits) t2 += s.tau * s.tau;
  Vec base = Vec::Constant(n, t2);
  if (lin_diag.size() == n) base += lin_diag;
  return base;
}

SmwPreconditioner build_h_alpha(const SdpProblem& prob, const std::vector<SplitBlock>& splits,
                                const Vec& lin_diag) {
  return SmwPreconditioner(alpha_base(prob.num_vars(), splits, lin_diag),
                           alpha_factor(prob, splits));
}

DiagonalPreconditioner build_h_beta(int n, const std::vector<SplitBlock>& splits,
                                    const Vec& lin_diag) {
  return DiagonalPreconditioner(alpha_base(n, splits, lin_diag));
}

SpMatC gram_base(const SdpProblem& prob, const std::vector<double>& weights, const Vec& d) {
  const int n = prob.num_vars();
  SpMatC out(n, n);
  const double r2 = std::sqrt(2.0);
  for (int i = 0; i < prob.num_blocks(); ++i) {
    if (weights[i] == 0.0) continue;
    const int m = prob.block_dim(i);
    std::vector<Eigen::Triplet<double>> trip;
    for (int j = 0; j < n; ++j) {
      for (const auto& e : prob.block(i).constraints[j].entries()) {
        const int idx = e.row * (e.row + 1) / 2 + e.col;
        trip.emplace_back(idx, j, (e.row == e.col ? 1.0 : r2) * e.value);
      }
    }
    SpMatC b(m * (m + 1) / 2, n);
    b.setFromTriplets(trip.begin(), trip.end());
    SpMatC g = SpMatC(b.transpose()) * b;
    out += weights[i] * g;
  }
  SpMatC dm(n, n);
  std::vector<Eigen::Triplet<double>> dt;
  for (int j = 0; j < n; ++j) dt.emplace_back(j, j, d(j));
  dm.setFromTriplets(dt.begin(), dt.end());
  out += dm;
  out.makeCompressed();
  return out;
}

SmwPreconditioner build_h_tilde(const SdpProblem& prob, const std::vector<SplitBlock>& splits,
                                const Vec& lin_diag) {
  std::vector<double> w;
  for (const auto& s : splits) w.push_back(s.tau * s.tau);
  Vec d = lin_diag.size() == prob.num_vars() ? lin_diag : Vec::Zero(prob.num_vars());
  return SmwPreconditioner(gram_base(prob, w, d), alpha_factor(prob, splits));
}

std::vector<double> gamma_weights(const std::vector<SplitBlock>& w_splits,
                                  const std::vector<Mat>& v_mats) {
  std::vector<double> w;
  for (std::size_t i = 0; i < w_splits.size(); ++i) {
    const double t1 = 10.0 * std::max(0.0, w_splits[i].w0_min);
    const double t2 = v_mats[i].trace() / static_cast<double>(v_mats[i].rows());
    w.push_back(t1 * t2);
  }
  return w;
}

Vec gamma_base(const SdpProblem& prob, const std::vector<double>& weights, const Vec& h_lin) {
  Vec base = h_lin;
  for (int i = 0; i < prob.num_blocks(); ++i) base += weights[i] * prob.column_norms_sq(i);
  return base;
}

Mat gamma_factor(const SdpProblem& prob, const std::vector<SplitBlock>& w_splits,
                 const std::vector<Mat>& v_mats) {
  std::vector<Mat> parts(prob.num_blocks());
  const double s2 = std::sqrt(2.0);
  for_each_index(prob.num_blocks(), [&](int i) {
    if (w_splits[i].u.cols() == 0) {
      parts[i] = Mat(prob.num_vars(), 0);
      return;
    }
    parts[i] = sandwich_factor(prob.block(i), w_splits[i].u, psd_factor(v_mats[i]), s2);
  });
  return hconcat(parts, prob.num_vars());
}

Mat delta_factor(const SdpProblem& prob, const std::vector<SplitBlock>& w_splits,
                 const std::vector<SplitBlock>& v_splits) {
  std::vector<Mat> parts(2 * prob.num_blocks());
  const double s2 = std::sqrt(2.0);
  for_each_index(prob.num_blocks(), [&](int i) {
    const auto& ws = w_splits[i];
    const auto& vs = v_splits[i];
    const Mat theta = psd_factor(vs.w0 + 0.5 * vs.u * vs.u.transpose());
    const Mat gamma = psd_factor(ws.w0 + 0.5 * ws.u * ws.u.transpose());
    parts[2 * i] = ws.u.cols() ? sandwich_factor(prob.block(i), ws.u, theta, s2)
                               : Mat(prob.num_vars(), 0);
    parts[2 * i + 1] = vs.u.cols() ? sandwich_factor(prob.block(i), vs.u, gamma, s2)
                                   : Mat(prob.num_vars(), 0);
  });
  return hconcat(parts, prob.num_vars());
}

SmwPreconditioner build_h_gamma(const SdpProblem& prob, const std::vector<SplitBlock>& w_splits,
                                const std::vector<Mat>& v_mats, const Vec& h_lin) {
  return SmwPreconditioner(gamma_base(prob, gamma_weights(w_splits, v_mats), h_lin),
                           gamma_factor(prob, w_splits, v_mats));
}

SmwPreconditioner build_h_delta(const SdpProblem& prob, const std::vector<SplitBlock>& w_splits,
                                const std::vector<SplitBlock>& v_splits, const Vec& h_lin) {
  std::vector<Mat> v0;
  for (const auto& vs : v_splits) v0.push_back(vs.w0);
  return SmwPreconditioner(gamma_base(prob, gamma_weights(w_splits, v0), h_lin),
                           delta_factor(prob, w_splits, v_splits));
}

bool hybrid_should_switch(int n, int p, int k, int iter, int last_cg_count) {
  const double rn = std::sqrt(static_cast<double>(n));
  return last_cg_count > k * p * rn / 10.0 && iter > rn / 60.0;
}

}  // namespace lorank
