#pragma once

#include "lorank/linalg.hpp"

#include <functional>

namespace lorank {

/// Symmetric linear map given by its action.
struct LinOp {
  int dim = 0;
  std::function<void(const Vec&, Vec&)> apply;

  Vec operator()(const Vec& x) const {
    Vec y(dim);
    apply(x, y);
    return y;
  }

  static LinOp identity(int n);
  static LinOp dense(const Mat& m);
  static LinOp diagonal(const Vec& d);
};

enum class PcgStatus { converged, max_iterations, breakdown };

struct PcgReport {
  int iterations = 0;
  double relative_residual = 0.0;
  PcgStatus status = PcgStatus::converged;

  bool ok() const { return status == PcgStatus::converged; }
};

struct PcgOptions {
  double tol = 1e-6;
  int maxiter = 100000;
  /// Recompute b − Ax from scratch every this many iterations.
  int residual_refresh = 50;
};

/// Preconditioned CG for op·x = rhs. `x` holds x0 on entry and the iterate on
/// exit. `precond_inv` applies the inverse preconditioner; pass an empty
/// LinOp (dim 0) for plain CG.
PcgReport pcg_solve(const LinOp& op, const LinOp& precond_inv, const Vec& rhs, Vec& x,
                    const PcgOptions& opts = {});

/// Adaptive CG tolerance: starts at 0.01, halves after each major iteration.
struct CgTolerance {
  double current = 1e-2;
  double floor = 1e-6;
  double decay = 0.5;
};

CgTolerance next_tolerance(CgTolerance t);

}  // namespace lorank
