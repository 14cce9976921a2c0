#include "lorank/pcg.hpp"

#include <algorithm>
#include <cmath>

namespace lorank {

LinOp LinOp::identity(int n) {
  return {n, [](const Vec& x, Vec& y) { y = x; }};
}

LinOp LinOp::dense(const Mat& m) {
  return {static_cast<int>(m.rows()), [m](const Vec& x, Vec& y) { y.noalias() = m * x; }};
}

LinOp LinOp::diagonal(const Vec& d) {
  return {static_cast<int>(d.size()), [d](const Vec& x, Vec& y) { y = d.cwiseProduct(x); }};
}

PcgReport pcg_solve(const LinOp& op, const LinOp& precond_inv, const Vec& rhs, Vec& x,
                    const PcgOptions& opts) {
  const int n = op.dim;
  PcgReport rep;
  if (x.size() != n) x = Vec::Zero(n);
  const double bnorm = rhs.norm();
  if (bnorm == 0.0) {
    x.setZero();
    return rep;
  }

  Vec r(n), z(n), p(n), q(n);
  op.apply(x, q);
  r = rhs - q;
  auto precondition = [&](const Vec& in, Vec& out) {
    if (precond_inv.dim > 0) {
      precond_inv.apply(in, out);
    } else {
      out = in;
    }
  };

  rep.relative_residual = r.norm() / bnorm;
  if (rep.relative_residual <= opts.tol) return rep;

  precondition(r, z);
  p = z;
  double rz = r.dot(z);

  for (int it = 1; it <= opts.maxiter; ++it) {
    op.apply(p, q);
    const double pq = p.dot(q);
    if (!(pq > 0.0) || !(rz > 0.0)) {
      rep.iterations = it - 1;
      rep.status = PcgStatus::breakdown;
      return rep;
    }
    const double alpha = rz / pq;
    x += alpha * p;
    if (opts.residual_refresh > 0 && it % opts.residual_refresh == 0) {
      op.apply(x, q);
      r = rhs - q;
    } else {
      r -= alpha * q;
    }
    rep.iterations = it;
    rep.relative_residual = r.norm() / bnorm;
    if (rep.relative_residual <= opts.tol) {
      // Confirm with the true residual before accepting.
      op.apply(x, q);
      const double true_res = (rhs - q).norm() / bnorm;
      if (true_res <= opts.tol) {
        rep.relative_residual = true_res;
        return rep;
      }
      r = rhs - q;
      rep.relative_residual = true_res;
    }
    precondition(r, z);
    const double rz_new = r.dot(z);
    p = z + (rz_new / rz) * p;
    rz = rz_new;
  }
  rep.status = PcgStatus::max_iterations;
  return rep;
}

CgTolerance next_tolerance(CgTolerance t) {
  t.current = std::max(t.floor, t.current * t.decay);
  return t;
}

}  // namespace lorank
