#include "lorank/diagnostics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace lorank {

namespace {

void check_size(const SdpProblem& prob) {
  if (prob.num_vars() > kDiagnosticMaxVars) {
    throw std::invalid_argument("dense diagnostics need n <= " +
                                std::to_string(kDiagnosticMaxVars));
  }
}

}  // namespace

Mat vec_constraints(const LmiBlock& block) {
  const int m = block.dim;
  const int n = static_cast<int>(block.constraints.size());
  Mat out = Mat::Zero(static_cast<Eigen::Index>(m) * m, n);
  for (int j = 0; j < n; ++j) {
    const Mat a = block.constraints[j].to_dense();
    out.col(j) = Eigen::Map<const Vec>(a.data(), a.size());
  }
  return out;
}

Mat kron_congruence(const LmiBlock& block, const Mat& left, const Mat& right) {
  const int n = static_cast<int>(block.constraints.size());
  std::vector<Mat> dense(n);
  for (int j = 0; j < n; ++j) dense[j] = block.constraints[j].to_dense();
  std::vector<Mat> la(n);
  for (int l = 0; l < n; ++l) la[l] = left * dense[l] * right;
  Mat out(n, n);
  for (int j = 0; j < n; ++j) {
    for (int l = 0; l < n; ++l) out(j, l) = frob_dot(dense[j], la[l]);
  }
  return out;
}

Mat lin_congruence(const SdpProblem& prob, const Vec& w) {
  const int n = prob.num_vars();
  if (prob.num_lin() == 0) return Mat::Zero(n, n);
  const Mat d = Mat(prob.lin_matrix());
  return d.transpose() * w.asDiagonal() * d;
}

Mat dense_schur(const SdpProblem& prob, const IpState& st) {
  check_size(prob);
  Mat h = lin_congruence(prob, st.lin_ratio);
  for (int i = 0; i < prob.num_blocks(); ++i) {
    h += kron_congruence(prob.block(i), st.nt[i].w, st.nt[i].w);
  }
  return symmetrize(h);
}

Mat dense_pdal_hessian(const SdpProblem& prob, const PdalState& st, const PdalEval& ev) {
  check_size(prob);
  const int n = prob.num_vars();
  Mat h = st.r * Mat::Identity(n, n) + lin_congruence(prob, ev.wbar);
  for (int i = 0; i < prob.num_blocks(); ++i) {
    h += 2.0 * kron_congruence(prob.block(i), ev.xbar[i], ev.z[i]);
  }
  return symmetrize(h);
}

Vec pencil_eigenvalues(const Mat& m, const Mat& p) {
  return sym_eigenvalues(chol(p).congruence_inverse(symmetrize(m)));
}

HessianFloor hessian_floor(const Mat& h, double r) {
  const Vec e = sym_eigenvalues(h);
  HessianFloor f;
  f.lambda_min = e(0);
  f.r = r;
  f.norm = e.cwiseAbs().maxCoeff();
  f.slack = 1e-8 * r + 10.0 * std::numeric_limits<double>::epsilon() * f.norm;
  return f;
}

double preconditioned_condition(const Mat& h, const Mat& p) {
  const Vec ev = pencil_eigenvalues(h, p);
  return ev(ev.size() - 1) / ev(0);
}

ConditionBound alpha_condition_bound(const SdpProblem& prob, const IpState& st,
                                     const std::vector<SplitBlock>& splits) {
  check_size(prob);
  const int n = prob.num_vars();
  Vec lin_diag = Vec::Zero(n);
  Mat lin_rest = Mat::Zero(n, n);
  if (prob.num_lin() > 0) {
    const Mat dl = lin_congruence(prob, st.lin_ratio);
    lin_diag = dl.diagonal();
    lin_rest = dl;
    lin_rest.diagonal().setZero();
  }
  const Mat p = build_h_alpha(prob, splits, lin_diag).dense();
  const CholFactor pf = chol(symmetrize(p));
  ConditionBound cb;
  cb.kappa = preconditioned_condition(dense_schur(prob, st), p);

  auto add = [&](const Mat& e) {
    const Vec ev = sym_eigenvalues(pf.congruence_inverse(symmetrize(e)));
    cb.eps_upper.push_back(ev(ev.size() - 1));
    cb.eps_lower.push_back(ev(0));
  };
  for (int i = 0; i < prob.num_blocks(); ++i) {
    const SplitBlock& s = splits[i];
    Mat e = kron_congruence(prob.block(i), s.w0, s.w0);
    e.diagonal().array() -= s.tau * s.tau;
    add(e);
  }
  if (prob.num_lin() > 0) add(lin_rest);

  double up = 1.0, lo = 1.0;
  for (double v : cb.eps_upper) up += v;
  for (double v : cb.eps_lower) lo += v;
  cb.bound = lo > 0.0 ? up / lo : std::numeric_limits<double>::infinity();
  return cb;
}

}  // namespace lorank
