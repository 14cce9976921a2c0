#include "lorank/penalty.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <string>

namespace lorank {

namespace {

PenaltyValue unscaled(const PenaltyFn& fn, double t) {
  PenaltyValue v;
  if (fn.kind == PenaltyKind::hyperbolic) {
    if (!(t < 1.0)) throw DomainViolation("hyperbolic penalty evaluated at t >= 1");
    const double s = 1.0 - t;
    v.value = t / s;
    v.d1 = 1.0 / (s * s);
    v.d2 = 2.0 / (s * s * s);
    return v;
  }
  const double tq = fn.tau_q;
  if (t <= tq) {
    if (!(t < 1.0)) throw DomainViolation("logarithmic penalty evaluated at t >= 1");
    const double s = 1.0 - t;
    v.value = -std::log(s);
    v.d1 = 1.0 / s;
    v.d2 = 1.0 / (s * s);
    return v;
  }
  const double s = 1.0 - tq;
  const double f0 = -std::log(s), f1 = 1.0 / s, f2 = 1.0 / (s * s);
  const double h = t - tq;
  v.value = f0 + f1 * h + 0.5 * f2 * h * h;
  v.d1 = f1 + f2 * h;
  v.d2 = f2;
  return v;
}

}  // namespace

PenaltyValue penalty_eval(const PenaltyFn& fn, double t, double pi) {
  if (!(pi > 0.0)) throw std::invalid_argument("penalty parameter must be positive");
  PenaltyValue u = unscaled(fn, t / pi);
  return {pi * u.value, u.d1, u.d2 / pi};
}

Mat lmi_value(const LmiBlock& block, const Vec& y) {
  Mat a = block_adjoint(block, y);
  block.objective.add_to(a, -1.0);
  return a;
}

Mat z_matrix(const Mat& a_of_y, double pi) {
  const Eigen::Index m = a_of_y.rows();
  const Mat shifted = pi * Mat::Identity(m, m) - a_of_y;
  Eigen::LLT<Mat> llt(shifted);
  if (llt.info() != Eigen::Success) {
    throw DomainViolation("A(y) is not below pi*I");
  }
  Mat z = llt.solve(Mat::Identity(m, m));
  if (!z.allFinite()) throw DomainViolation("A(y) is not below pi*I");
  return symmetrize(z);
}

Mat multiplier_update_lmi(const Mat& z, const Mat& x, double pi) {
  return symmetrize(pi * pi * (z * x * z));
}

Vec multiplier_update_lin(const SdpProblem& prob, const Vec& y, const Vec& x_lin, double pi,
                          const PenaltyFn& fn) {
  const Vec t = prob.lin_matrix() * y - prob.lin_rhs();
  Vec out(t.size());
  for (Eigen::Index l = 0; l < t.size(); ++l) out(l) = x_lin(l) * penalty_eval(fn, t(l), pi).d1;
  return out;
}

}  // namespace lorank
