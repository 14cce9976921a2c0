#include "lorank/ip.hpp"

#include "lorank/parallel.hpp"
#include "lorank/sdpa_io.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>

namespace lorank {

double complementarity_mu(const SdpProblem& prob, const PrimalDualPoint& pt) {
  return pt.x.dot(pt.s) / static_cast<double>(prob.total_order());
}

PrimalDualPoint ip_initial_point(const SdpProblem& prob) {
  PrimalDualPoint pt;
  const int n = prob.num_vars();
  pt.y = Vec::Zero(n);
  pt.x = BlockSymMatrix::zeros_like(prob);
  pt.s = BlockSymMatrix::zeros_like(prob);
  const Vec& b = prob.b();
  for (int i = 0; i < prob.num_blocks(); ++i) {
    const auto& blk = prob.block(i);
    const double m = blk.dim;
    double ratio = 0.0, norm_a = 0.0;
    for (int j = 0; j < n; ++j) {
      const double na = std::sqrt(blk.constraints[j].frobenius_sq());
      ratio = std::max(ratio, (1.0 + std::abs(b(j))) / (1.0 + na));
      norm_a = std::max(norm_a, na);
    }
    const double xi = std::max({10.0, std::sqrt(m), m * ratio});
    const double eta =
        std::max({10.0, std::sqrt(m), norm_a, std::sqrt(blk.objective.frobenius_sq())});
    pt.x.blocks[i] = xi * Mat::Identity(blk.dim, blk.dim);
    pt.s.blocks[i] = eta * Mat::Identity(blk.dim, blk.dim);
  }
  if (prob.num_lin() > 0) {
    const double nu = prob.num_lin();
    Eigen::SparseMatrix<double, Eigen::ColMajor> dc = prob.lin_matrix();
    double ratio = 0.0, norm_a = 0.0;
    for (int j = 0; j < n; ++j) {
      const double na = dc.col(j).norm();
      ratio = std::max(ratio, (1.0 + std::abs(b(j))) / (1.0 + na));
      norm_a = std::max(norm_a, na);
    }
    const double xi = std::max({10.0, std::sqrt(nu), nu * ratio});
    const double eta =
        std::max({10.0, std::sqrt(nu), norm_a, prob.lin_rhs().cwiseAbs().maxCoeff()});
    pt.x.lin.setConstant(xi);
    pt.s.lin.setConstant(eta);
  }
  return pt;
}

IpState make_ip_state(const SdpProblem& prob, PrimalDualPoint pt, int iter) {
  IpState st;
  st.point = std::move(pt);
  st.iter = iter;
  st.nt.resize(prob.num_blocks());
  for (int i = 0; i < prob.num_blocks(); ++i) {
    st.nt[i] = nt_scaling(st.point.x.blocks[i], st.point.s.blocks[i]);
  }
  st.lin_ratio = st.point.x.lin.cwiseQuotient(st.point.s.lin);
  st.mu = complementarity_mu(prob, st.point);
  return st;
}

IpResiduals ip_residuals(const SdpProblem& prob, const PrimalDualPoint& pt) {
  IpResiduals r;
  r.rp = prob.b() - apply_A(prob, pt.x);
  r.rd = dual_slack(prob, pt.y);
  for (int i = 0; i < prob.num_blocks(); ++i) r.rd.blocks[i] -= pt.s.blocks[i];
  r.rd.lin -= pt.s.lin;
  return r;
}

Vec schur_matvec(const SdpProblem& prob, const IpState& state, const Vec& dy) {
  std::vector<Vec> parts(prob.num_blocks());
  for_each_index(prob.num_blocks(), [&](int i) {
    const Mat m = block_adjoint(prob.block(i), dy);
    const Mat& w = state.nt[i].w;
    parts[i] = block_apply(prob.block(i), w * m * w);
  });
  Vec out = Vec::Zero(prob.num_vars());
  for (const auto& p : parts) out += p;
  if (prob.num_lin() > 0) {
    const Vec t = state.lin_ratio.cwiseProduct(prob.lin_matrix() * dy);
    out += prob.lin_matrix().transpose() * t;
  }
  return out;
}

LinOp schur_operator(const SdpProblem& prob, const IpState& state) {
  return {prob.num_vars(),
          [&prob, &state](const Vec& x, Vec& y) { y = schur_matvec(prob, state, x); }};
}

Vec schur_lin_diag(const SdpProblem& prob, const IpState& state) {
  if (prob.num_lin() == 0) return Vec::Zero(prob.num_vars());
  const SpMat d2 = prob.lin_matrix().cwiseAbs2();
  return d2.transpose() * state.lin_ratio;
}

namespace {

// A(M) over the LMI blocks only.
Vec lmi_apply(const SdpProblem& prob, const std::vector<Mat>& m) {
  std::vector<Vec> parts(prob.num_blocks());
  for_each_index(prob.num_blocks(),
                 [&](int i) { parts[i] = block_apply(prob.block(i), m[i]); });
  Vec out = Vec::Zero(prob.num_vars());
  for (const auto& p : parts) out += p;
  return out;
}

// R_c = σμS⁻¹ − X + G·R_NT·Gᵀ per block.
std::vector<Mat> complementarity_target(const SdpProblem& prob, const IpState& st, double sigma,
                                        double mu, const IpDirections* pred) {
  std::vector<Mat> rc(prob.num_blocks());
  for (int i = 0; i < prob.num_blocks(); ++i) {
    const auto& nt = st.nt[i];
    rc[i] = -st.point.x.blocks[i];
    if (sigma != 0.0) rc[i] += sigma * mu * nt.s_inverse();
    if (pred) {
      const Mat rnt = second_order_correction(nt, pred->dx.blocks[i], pred->ds.blocks[i]);
      rc[i] += nt.g * rnt * nt.g.transpose();
    }
  }
  return rc;
}

// σμ/s − x − δx∘δs/s
Vec lin_target(const IpState& st, double sigma, double mu, const IpDirections* pred) {
  const Vec& x = st.point.x.lin;
  const Vec& s = st.point.s.lin;
  Vec v = -x;
  if (sigma != 0.0) v += (sigma * mu) * s.cwiseInverse();
  if (pred) v -= pred->dx.lin.cwiseProduct(pred->ds.lin).cwiseQuotient(s);
  return v;
}

Vec schur_rhs(const SdpProblem& prob, const IpState& st, const IpResiduals& res,
              const std::vector<Mat>& rc, const Vec& vlin) {
  std::vector<Mat> t(prob.num_blocks());
  for (int i = 0; i < prob.num_blocks(); ++i) {
    const Mat& w = st.nt[i].w;
    t[i] = rc[i] - w * res.rd.blocks[i] * w;
  }
  Vec r = res.rp - lmi_apply(prob, t);
  if (prob.num_lin() > 0) {
    const Vec u = vlin - st.lin_ratio.cwiseProduct(res.rd.lin);
    r -= prob.lin_matrix().transpose() * u;
  }
  return r;
}

}  // namespace

Vec rhs_predictor(const SdpProblem& prob, const IpState& state, const IpResiduals& res) {
  return schur_rhs(prob, state, res, complementarity_target(prob, state, 0.0, 0.0, nullptr),
                   lin_target(state, 0.0, 0.0, nullptr));
}

Vec rhs_corrector(const SdpProblem& prob, const IpState& state, const IpResiduals& res,
                  double sigma, double mu, const IpDirections& pred) {
  return schur_rhs(prob, state, res, complementarity_target(prob, state, sigma, mu, &pred),
                   lin_target(state, sigma, mu, &pred));
}

IpDirections recover_directions(const SdpProblem& prob, const IpState& state,
                                const IpResiduals& res, const Vec& dy, double sigma, double mu,
                                const IpDirections* pred) {
  IpDirections d;
  d.dy = dy;
  const std::vector<Mat> rc = complementarity_target(prob, state, sigma, mu, pred);
  d.ds = apply_A_adjoint(prob, dy);
  d.dx.blocks.resize(prob.num_blocks());
  for (int i = 0; i < prob.num_blocks(); ++i) {
    d.ds.blocks[i] = res.rd.blocks[i] - d.ds.blocks[i];
    const Mat& w = state.nt[i].w;
    d.dx.blocks[i] = symmetrize(rc[i] - w * d.ds.blocks[i] * w);
  }
  d.ds.lin = res.rd.lin - d.ds.lin;
  d.dx.lin = lin_target(state, sigma, mu, pred) - state.lin_ratio.cwiseProduct(d.ds.lin);
  return d;
}

namespace {

double max_step(const std::vector<Mat>& x, const Vec& xl, const std::vector<Mat>& dx,
                const Vec& dxl, double tau) {
  double lam = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) lam = std::min(lam, min_eig_pencil(x[i], dx[i]));
  for (Eigen::Index i = 0; i < xl.size(); ++i) {
    if (dxl(i) < 0.0) lam = std::min(lam, dxl(i) / xl(i));
  }
  return lam < 0.0 ? std::min(1.0, -tau / lam) : 1.0;
}

bool all_pd(const std::vector<Mat>& x, const Vec& xl) {
  for (const auto& b : x) {
    try {
      chol(b);
    } catch (const NotPositiveDefinite&) {
      return false;
    }
  }
  return xl.size() == 0 || xl.minCoeff() > 0.0;
}

}  // namespace

std::pair<double, double> step_lengths(const IpState& st, const IpDirections& dir,
                                       double tau_frac) {
  const auto& p = st.point;
  double a = max_step(p.x.blocks, p.x.lin, dir.dx.blocks, dir.dx.lin, tau_frac);
  double b = max_step(p.s.blocks, p.s.lin, dir.ds.blocks, dir.ds.lin, tau_frac);
  auto repair = [](double step, const BlockSymMatrix& x, const BlockSymMatrix& dx) {
    for (int t = 0; t < 10; ++t) {
      BlockSymMatrix trial = x;
      trial.axpy(step, dx);
      if (all_pd(trial.blocks, trial.lin)) return step;
      step *= 0.5;
    }
    return step;
  };
  a = repair(a, p.x, dir.dx);
  b = repair(b, p.s, dir.ds);
  return {a, b};
}

std::vector<SplitBlock> ip_splits(const IpState& state, const RankHints& hints, TauRule rule) {
  std::vector<SplitBlock> out(state.nt.size());
  for_each_index(static_cast<int>(state.nt.size()), [&](int i) {
    const EigDecomp e = sym_eig(state.nt[i].w);
    const int k = hints.for_block(i, e.values);
    out[i] = spectral_split(e, k, rule);
  });
  return out;
}

std::unique_ptr<Preconditioner> build_ip_preconditioner(const SdpProblem& prob,
                                                        const IpState& state, PrecondKind kind,
                                                        const RankHints& hints, TauRule rule) {
  if (kind == PrecondKind::none) return nullptr;
  if (!usable_by_ip(kind) || kind == PrecondKind::hybrid) {
    throw std::invalid_argument("preconditioner '" + to_string(kind) +
                                "' cannot be built for the interior-point solver");
  }
  const auto splits = ip_splits(state, hints, rule);
  const Vec lin = schur_lin_diag(prob, state);
  switch (kind) {
    case PrecondKind::alpha:
      return std::make_unique<SmwPreconditioner>(build_h_alpha(prob, splits, lin));
    case PrecondKind::tilde:
      return std::make_unique<SmwPreconditioner>(build_h_tilde(prob, splits, lin));
    default:
      return std::make_unique<DiagonalPreconditioner>(build_h_beta(prob.num_vars(), splits, lin));
  }
}

std::pair<PrimalDualPoint, SolveReport> ip_solve(const SdpProblem& prob, const IpConfig& cfg) {
  using clock = std::chrono::steady_clock;
  const auto t0 = clock::now();
  if (!usable_by_ip(cfg.precond)) {
    throw std::invalid_argument("preconditioner '" + to_string(cfg.precond) +
                                "' is not available for the interior-point solver");
  }
  SolveReport rep;
  rep.solver = "ip";
  rep.precond = to_string(cfg.precond);
  rep.status = "max_iterations";

  PrimalDualPoint pt = ip_initial_point(prob);
  CgTolerance tol = cfg.cg_tol;
  PrecondKind active = cfg.precond == PrecondKind::hybrid ? PrecondKind::beta : cfg.precond;
  const int n = prob.num_vars();
  int k_hint = cfg.rank.k.empty() ? 1 : *std::max_element(cfg.rank.k.begin(), cfg.rank.k.end());

  PrimalDualPoint best = pt;
  double best_err = std::numeric_limits<double>::infinity();
  for (int it = 1; it <= cfg.maxiter + 1; ++it) {
    DimacsErrors err;
    try {
      err = dimacs(prob, pt);
    } catch (const std::runtime_error&) {
      err.err[0] = std::numeric_limits<double>::quiet_NaN();
    }
    if (!std::isfinite(err.max())) {
      rep.status = "numerical_failure";
      break;
    }
    if (err.max() < best_err) {
      best_err = err.max();
      best = pt;
    }
    if (err.satisfied(cfg.eps_dimacs)) {
      rep.status = "converged";
      rep.converged = true;
      break;
    }
    if (it > cfg.maxiter) break;

    const auto ti = clock::now();
    IpState st;
    try {
      st = make_ip_state(prob, pt, it);
    } catch (const NotPositiveDefinite&) {
      rep.status = "scaling_failure";
      break;
    }
    try {
      const IpResiduals res = ip_residuals(prob, st.point);
      const LinOp op = schur_operator(prob, st);

      std::unique_ptr<Preconditioner> pc;
      try {
        pc = build_ip_preconditioner(prob, st, active, cfg.rank, cfg.tau_rule);
      } catch (const NotPositiveDefinite&) {
        pc = build_ip_preconditioner(prob, st, PrecondKind::beta, cfg.rank, cfg.tau_rule);
      }
      const LinOp pinv = pc ? pc->inverse_op() : LinOp{};
      if (cfg.observer) cfg.observer({prob, st, pc.get(), active});

      PcgOptions po;
      po.tol = tol.current;
      po.maxiter = cfg.cg_maxiter;

      // Predictor.
      Vec dy = Vec::Zero(n);
      const PcgReport rp = pcg_solve(op, pinv, rhs_predictor(prob, st, res), dy, po);
      const IpDirections pred = recover_directions(prob, st, res, dy, 0.0, st.mu, nullptr);
      const auto [ap, bp] = step_lengths(st, pred, cfg.tau_frac);
      BlockSymMatrix xs = st.point.x, ss = st.point.s;
      xs.axpy(ap, pred.dx);
      ss.axpy(bp, pred.ds);
      const double xsdot = st.point.x.dot(st.point.s);
      const double sigma =
          std::min(1.0, std::pow(std::max(0.0, xs.dot(ss)) / xsdot, cfg.sigma_exponent));

      // Corrector.
      dy.setZero();
      const PcgReport rc =
          pcg_solve(op, pinv, rhs_corrector(prob, st, res, sigma, st.mu, pred), dy, po);
      const IpDirections corr = recover_directions(prob, st, res, dy, sigma, st.mu, &pred);
      const auto [alpha, beta] = step_lengths(st, corr, cfg.tau_frac);

      pt.x.axpy(alpha, corr.dx);
      pt.y += beta * corr.dy;
      pt.s.axpy(beta, corr.ds);

      IterationRecord rec;
      rec.iter = it;
      rec.cg = rp.iterations + rc.iterations;
      rec.cg_corrector = rc.iterations;
      rec.alpha = alpha;
      rec.beta = beta;
      rec.mu = st.mu;
      rec.dimacs = err.max();
      rec.precond = to_string(active);
      rec.seconds = std::chrono::duration<double>(clock::now() - ti).count();
      rep.trace.push_back(rec);
      rep.cg_total += rec.cg;
      if (cfg.verbose) {
        std::fprintf(stderr,
                     "ip %3d  mu %.3e  dimacs %.3e  a %.3f b %.3f  sigma %.2e  cg %d+%d  %s\n",
                     it, st.mu, err.max(), alpha, beta, sigma, rp.iterations, rc.iterations,
                     rec.precond.c_str());
      }

      if (cfg.precond == PrecondKind::hybrid && active == PrecondKind::beta &&
          hybrid_should_switch(n, prob.num_blocks(), k_hint, it, rc.iterations)) {
        active = PrecondKind::alpha;
      }
      tol = next_tolerance(tol);
    } catch (const std::runtime_error&) {
      rep.status = "numerical_failure";
      break;
    }
  }
  if (!rep.converged) pt = std::move(best);
  rep.iterations = static_cast<int>(rep.trace.size());
  rep.dimacs = dimacs(prob, pt);
  rep.objective_primal = sdpa_primal_objective(prob, pt.y);
  rep.objective_dual = sdpa_dual_objective(prob, pt.x);
  rep.spectra = summarize_spectra(pt.x);
  rep.seconds = std::chrono::duration<double>(clock::now() - t0).count();
  return {std::move(pt), std::move(rep)};
}

}  // namespace lorank
