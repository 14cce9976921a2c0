#include "lorank/pdal.hpp"

#include "lorank/parallel.hpp"
#include "lorank/sdpa_io.hpp"

#include <json.hpp>

#include <Eigen/Cholesky>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace lorank {

PdalConfig PdalConfig::tru() { return PdalConfig{}; }

PdalConfig PdalConfig::vib() {
  PdalConfig c;
  c.pi_lin_min = 1e-11;
  c.pi_lmi_min = 1e-5;
  c.pi_lin_upd = 0.3;
  c.pi_lmi_upd = 0.3;
  c.gamma_lin = 1.0;
  c.gamma_lmi = 0.8;
  c.lin_penalty = {PenaltyKind::qlog, 0.9};
  return c;
}

void validate(const PdalConfig& c) {
  auto need = [](bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(what);
  };
  need(c.pi_lin_min > 0 && c.pi_lmi_min > 0, "pi_*_min must be positive");
  need(c.pi_lin_upd > 0 && c.pi_lin_upd < 1, "pi_lin_upd must lie in (0,1)");
  need(c.pi_lmi_upd > 0 && c.pi_lmi_upd < 1, "pi_lmi_upd must lie in (0,1)");
  need(c.gamma_lin >= 0 && c.gamma_lin <= 1, "gamma_lin must lie in [0,1]");
  need(c.gamma_lmi >= 0 && c.gamma_lmi <= 1, "gamma_lmi must lie in [0,1]");
  need(c.r > 0, "r must be positive");
  need(c.eps > 0 && c.eps_dimacs > 0, "tolerances must be positive");
  need(c.lin_penalty.tau_q > 0 && c.lin_penalty.tau_q <= 1, "tau_q must lie in (0,1]");
  need(usable_by_pdal(c.precond), "preconditioner not available for the penalty solver");
}

PdalConfig pdal_config_from_json(const std::string& text, PdalConfig base) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  if (!j.is_object()) throw std::invalid_argument("config: expected a JSON object");
  for (const auto& [key, val] : j.items()) {
    if (!val.is_number()) throw std::invalid_argument("config: '" + key + "' must be a number");
    const double v = val.get<double>();
    if (key == "pi_lin_min") base.pi_lin_min = v;
    else if (key == "pi_lmi_min") base.pi_lmi_min = v;
    else if (key == "pi_lin_upd") base.pi_lin_upd = v;
    else if (key == "pi_lmi_upd") base.pi_lmi_upd = v;
    else if (key == "gamma_lin") base.gamma_lin = v;
    else if (key == "gamma_lmi") base.gamma_lmi = v;
    else if (key == "r") base.r = v;
    else if (key == "eps") base.eps = v;
    else if (key == "eps_dimacs") base.eps_dimacs = v;
    else if (key == "tau_q") base.lin_penalty.tau_q = v;
    else throw std::invalid_argument("config: unknown key '" + key + "'");
  }
  validate(base);
  return base;
}

double lmi_lambda_max(const SdpProblem& prob, const Vec& y) {
  double lm = -std::numeric_limits<double>::infinity();
  for (const auto& blk : prob.blocks()) {
    lm = std::max(lm, sym_eigenvalues(lmi_value(blk, y)).maxCoeff());
  }
  return lm;
}

PdalState pdal_initial_state(const SdpProblem& prob, const PdalConfig& cfg) {
  PdalState st;
  const int n = prob.num_vars();
  st.y = Vec::Zero(n);
  st.y_center = st.y;
  st.mult = BlockSymMatrix::identity_like(prob);
  st.pi_lmi = prob.num_blocks() > 0 ? 1.1 * std::max(1.0, lmi_lambda_max(prob, st.y)) : 1.0;
  st.pi_lin = 1.0;
  st.r = cfg.r;
  st.lin_penalty = cfg.lin_penalty;
  return st;
}

PdalEval pdal_eval(const SdpProblem& prob, const PdalState& st, const Vec& y) {
  const int p = prob.num_blocks();
  PdalEval ev;
  ev.a.resize(p);
  ev.z.resize(p);
  ev.xbar.resize(p);
  for (int i = 0; i < p; ++i) {
    ev.a[i] = lmi_value(prob.block(i), y);
    ev.z[i] = z_matrix(ev.a[i], st.pi_lmi);
    ev.xbar[i] = multiplier_update_lmi(ev.z[i], st.mult.blocks[i], st.pi_lmi);
  }
  const int nl = prob.num_lin();
  ev.t = nl > 0 ? Vec(prob.lin_matrix() * y - prob.lin_rhs()) : Vec();
  ev.xbar_lin.resize(nl);
  ev.wbar.resize(nl);
  for (int l = 0; l < nl; ++l) {
    const PenaltyValue pv = penalty_eval(st.lin_penalty, ev.t(l), st.pi_lin);
    ev.xbar_lin(l) = st.mult.lin(l) * pv.d1;
    ev.wbar(l) = st.mult.lin(l) * pv.d2;
  }
  return ev;
}

double aug_lagrangian_value(const SdpProblem& prob, const PdalState& st, const Vec& y) {
  const PdalEval ev = pdal_eval(prob, st, y);
  double f = -prob.b().dot(y) + 0.5 * st.r * (y - st.y_center).squaredNorm();
  const double pi = st.pi_lmi;
  for (int i = 0; i < prob.num_blocks(); ++i) {
    const Mat& x = st.mult.blocks[i];
    f += pi * pi * frob_dot(x, ev.z[i]) - pi * x.trace();
  }
  for (int l = 0; l < prob.num_lin(); ++l) {
    f += st.mult.lin(l) * penalty_eval(st.lin_penalty, ev.t(l), st.pi_lin).value;
  }
  return f;
}

Vec aug_lagrangian_grad(const SdpProblem& prob, const PdalState& st, const PdalEval& ev) {
  BlockSymMatrix xbar{ev.xbar, ev.xbar_lin};
  return -prob.b() + st.r * (st.y - st.y_center) + apply_A(prob, xbar);
}

Vec aug_lagrangian_grad(const SdpProblem& prob, const PdalState& st, const Vec& y) {
  PdalState at = st;
  at.y = y;
  return aug_lagrangian_grad(prob, at, pdal_eval(prob, st, y));
}

namespace {

Mat sym_sandwich(const Mat& xbar, const Mat& h, const Mat& z) {
  const Mat q = xbar * h * z;
  return q + q.transpose();
}

Vec lin_part(const SdpProblem& prob, const Vec& w, const Vec& dy) {
  if (prob.num_lin() == 0) return Vec::Zero(dy.size());
  const Vec ddy = prob.lin_matrix() * dy;
  return prob.lin_matrix().transpose() * w.cwiseProduct(ddy);
}

bool positive_definite(const BlockSymMatrix& x) {
  for (const Mat& b : x.blocks) {
    Eigen::LLT<Mat> llt(b);
    if (llt.info() != Eigen::Success) return false;
  }
  return x.lin.size() == 0 || x.lin.minCoeff() > 0.0;
}

double frob_sq(const BlockSymMatrix& m) {
  double s = m.lin.squaredNorm();
  for (const Mat& b : m.blocks) s += b.squaredNorm();
  return s;
}

}  // namespace

Vec hessian_matvec(const SdpProblem& prob, const PdalState& st, const PdalEval& ev,
                   const Vec& dy) {
  const int p = prob.num_blocks();
  std::vector<Vec> parts(p);
  for_each_index(p, [&](int i) {
    const Mat h = block_adjoint(prob.block(i), dy);
    parts[i] = block_apply(prob.block(i), sym_sandwich(ev.xbar[i], h, ev.z[i]));
  });
  Vec out = st.r * dy + lin_part(prob, ev.wbar, dy);
  for (const Vec& v : parts) out += v;
  return out;
}

LinOp hessian_operator(const SdpProblem& prob, const PdalState& st, const PdalEval& ev) {
  return {prob.num_vars(),
          [&prob, &st, &ev](const Vec& v, Vec& out) { out = hessian_matvec(prob, st, ev, v); }};
}

Vec hessian_lin_diag(const SdpProblem& prob, const PdalState& st, const PdalEval& ev) {
  Vec d = Vec::Constant(prob.num_vars(), st.r);
  const SpMat& dm = prob.lin_matrix();
  for (int l = 0; l < dm.outerSize(); ++l) {
    for (SpMat::InnerIterator it(dm, l); it; ++it) {
      d(it.col()) += ev.wbar(l) * it.value() * it.value();
    }
  }
  return d;
}

PdResiduals pd_residuals(const SdpProblem& prob, const PdalState& st, const PdalEval& ev,
                         const Vec& yhat, const BlockSymMatrix& xhat) {
  PdResiduals res;
  res.g1 = -prob.b() + st.r * (yhat - st.y_center) + apply_A(prob, xhat);
  res.g2.blocks.resize(prob.num_blocks());
  for (int i = 0; i < prob.num_blocks(); ++i) res.g2.blocks[i] = xhat.blocks[i] - ev.xbar[i];
  res.g2.lin = xhat.lin - ev.xbar_lin;
  return res;
}

double merit(const PdResiduals& res) { return 0.5 * (res.g1.squaredNorm() + frob_sq(res.g2)); }

double merit_dderiv(const SdpProblem& prob, const PdalState& st, const PdalEval& ev,
                    const PdResiduals& res, const Vec& dy, const BlockSymMatrix& dx) {
  const Vec dg1 = st.r * dy + apply_A(prob, dx);
  double out = res.g1.dot(dg1);
  for (int i = 0; i < prob.num_blocks(); ++i) {
    const Mat h = block_adjoint(prob.block(i), dy);
    out += frob_dot(res.g2.blocks[i], dx.blocks[i] - sym_sandwich(ev.xbar[i], h, ev.z[i]));
  }
  if (prob.num_lin() > 0) {
    const Vec ddy = prob.lin_matrix() * dy;
    out += res.g2.lin.dot(dx.lin - ev.wbar.cwiseProduct(ddy));
  }
  return out;
}

BlockSymMatrix pd_dual_direction(const SdpProblem& prob, const PdalEval& ev,
                                 const BlockSymMatrix& xhat, const Vec& dy) {
  BlockSymMatrix dx;
  dx.blocks.resize(prob.num_blocks());
  for (int i = 0; i < prob.num_blocks(); ++i) {
    const Mat h = block_adjoint(prob.block(i), dy);
    dx.blocks[i] = ev.xbar[i] - xhat.blocks[i] + sym_sandwich(ev.xbar[i], h, ev.z[i]);
  }
  dx.lin = ev.xbar_lin - xhat.lin;
  if (prob.num_lin() > 0) dx.lin += ev.wbar.cwiseProduct(prob.lin_matrix() * dy);
  return dx;
}

PdDirection pd_newton_step(const SdpProblem& prob, const PdalState& st, const PdalEval& ev,
                           const BlockSymMatrix& xhat, const Preconditioner* precond,
                           const PcgOptions& opts) {
  PdDirection dir;
  const Vec rhs = -aug_lagrangian_grad(prob, st, ev);
  dir.dy = Vec::Zero(prob.num_vars());
  dir.cg = pcg_solve(hessian_operator(prob, st, ev), precond ? precond->inverse_op() : LinOp{},
                     rhs, dir.dy, opts);
  dir.dx = pd_dual_direction(prob, ev, xhat, dir.dy);
  return dir;
}

double pdal_error(const SdpProblem& prob, const Vec& y, const BlockSymMatrix& x) {
  const PrimalDualPoint pt{y, x, dual_slack(prob, y)};
  const DimacsErrors e = dimacs(prob, pt);
  return std::max({e.err[0], e.err[3], std::abs(e.err[4])});
}

std::unique_ptr<Preconditioner> build_pdal_preconditioner(const SdpProblem& prob,
                                                          const PdalState& st,
                                                          const PdalEval& ev, PrecondKind kind,
                                                          const RankHints& hints, TauRule rule) {
  if (kind == PrecondKind::none) return nullptr;
  if (!usable_by_pdal(kind)) {
    throw std::invalid_argument("preconditioner '" + to_string(kind) +
                                "' is not available for the penalty solver");
  }
  const int p = prob.num_blocks();
  std::vector<SplitBlock> w_splits(p), v_splits(p);
  std::vector<Mat> v_mats(p);
  for_each_index(p, [&](int i) {
    const EigDecomp we = sym_eig(ev.xbar[i] / st.pi_lmi);
    w_splits[i] = spectral_split(we, hints.for_block(i, we.values), rule);
    v_mats[i] = st.pi_lmi * ev.z[i];
    if (kind == PrecondKind::delta) {
      const EigDecomp ve = sym_eig(v_mats[i]);
      v_splits[i] = spectral_split(ve, hints.for_block(i, ve.values), rule);
    }
  });
  const Vec h_lin = hessian_lin_diag(prob, st, ev);
  const std::vector<double> weights = gamma_weights(w_splits, v_mats);
  switch (kind) {
    case PrecondKind::beta:
      return std::make_unique<DiagonalPreconditioner>(gamma_base(prob, weights, h_lin));
    case PrecondKind::gamma:
      return std::make_unique<SmwPreconditioner>(build_h_gamma(prob, w_splits, v_mats, h_lin));
    case PrecondKind::delta:
      return std::make_unique<SmwPreconditioner>(build_h_delta(prob, w_splits, v_splits, h_lin));
    case PrecondKind::tilde:
      return std::make_unique<SmwPreconditioner>(gram_base(prob, weights, h_lin),
                                                 gamma_factor(prob, w_splits, v_mats));
    default:
      throw std::invalid_argument("unsupported preconditioner");
  }
}

void penalty_update(PdalState& st, const PdalConfig& cfg, double lambda_max_a) {
  st.pi_lin = std::max(cfg.pi_lin_min, cfg.pi_lin_upd * st.pi_lin);
  st.pi_lmi = std::max({cfg.pi_lmi_min, cfg.pi_lmi_upd * st.pi_lmi, 1.01 * lambda_max_a});
}

InnerResult inner_solve(const SdpProblem& prob, const PdalState& st, double eps,
                        const PdalConfig& cfg, double cg_tol) {
  InnerResult out;
  out.y = st.y;
  out.x = st.mult;
  PdalState cur = st;
  PdalEval ev = pdal_eval(prob, cur, out.y);
  PdResiduals res = pd_residuals(prob, cur, ev, out.y, out.x);
  double m = merit(res);
  const double e_start = pdal_error(prob, st.y, st.mult);
  out.merit_trace.push_back(m);

  PcgOptions po;
  po.tol = cg_tol;
  po.maxiter = cfg.cg_maxiter;

  for (int it = 0;; ++it) {
    // A numerically singular X̂ is replaced by X̄(ŷ) in the outer update.
    if (m <= eps) {
      out.converged = true;
      break;
    }
    if (it > 0 && positive_definite(out.x)) {
      const double g2 = frob_sq(res.g2);
      const double g1 = res.g1.squaredNorm();
      const double gn = aug_lagrangian_grad(prob, cur, ev).norm();
      if (g2 < 0.1 && g1 < 0.05 * std::max(1.0, gn) &&
          pdal_error(prob, out.y, out.x) < 0.5 * e_start) {
        out.early = true;
        break;
      }
    }
    if (it >= cfg.inner_maxiter) break;

    std::unique_ptr<Preconditioner> pc;
    try {
      pc = build_pdal_preconditioner(prob, cur, ev, cfg.precond, cfg.rank, cfg.tau_rule);
    } catch (const NotPositiveDefinite&) {
      pc = build_pdal_preconditioner(prob, cur, ev, PrecondKind::beta, cfg.rank, cfg.tau_rule);
    }
    if (cfg.observer) cfg.observer({prob, cur, ev, pc.get()});

    const PdDirection dir = pd_newton_step(prob, cur, ev, out.x, pc.get(), po);
    out.cg += dir.cg.iterations;
    const double dm = merit_dderiv(prob, cur, ev, res, dir.dy, dir.dx);

    double alpha = 1.0;
    bool accepted = false;
    for (int h = 0; h <= cfg.max_halvings; ++h, alpha *= 0.5) {
      const Vec y_try = out.y + alpha * dir.dy;
      BlockSymMatrix x_try = out.x;
      x_try.axpy(alpha, dir.dx);
      PdalState at = cur;
      at.y = y_try;
      PdalEval ev_try;
      try {
        ev_try = pdal_eval(prob, at, y_try);
      } catch (const DomainViolation&) {
        continue;
      }
      PdResiduals res_try = pd_residuals(prob, at, ev_try, y_try, x_try);
      const double m_try = merit(res_try);
      const bool ok = dm < 0.0 ? m_try <= m + cfg.armijo * alpha * dm : m_try < m;
      if (!std::isfinite(m_try) || !ok) continue;
      out.y = y_try;
      out.x = std::move(x_try);
      cur = std::move(at);
      ev = std::move(ev_try);
      res = std::move(res_try);
      m = m_try;
      accepted = true;
      break;
    }
    out.iterations = it + 1;
    out.merit_trace.push_back(m);
    if (!accepted) {
      out.stalled = true;
      break;
    }
  }
  out.merit = m;
  return out;
}

std::pair<PrimalDualPoint, SolveReport> pdal_solve(const SdpProblem& prob, const PdalConfig& cfg) {
  using clock = std::chrono::steady_clock;
  const auto t0 = clock::now();
  validate(cfg);
  SolveReport rep;
  rep.solver = "pdal";
  rep.precond = to_string(cfg.precond);
  rep.status = "max_iterations";

  PdalState st = pdal_initial_state(prob, cfg);
  CgTolerance tol = cfg.cg_tol;

  auto make_point = [&](const Vec& y, const BlockSymMatrix& x) {
    return PrimalDualPoint{y, x, dual_slack(prob, y)};
  };
  PrimalDualPoint best = make_point(st.y, st.mult);
  double best_err = dimacs(prob, best).max();
  int stalls = 0;

  for (int k = 0; k < cfg.maxiter; ++k) {
    const auto ti = clock::now();
    const double eps_k =
        std::max(cfg.inner_floor, cfg.inner_start * std::pow(cfg.inner_decay, k));
    InnerResult in;
    try {
      in = inner_solve(prob, st, eps_k, cfg, tol.current);
    } catch (const std::runtime_error&) {
      rep.status = "numerical_failure";
      break;
    }
    if (in.stalled && in.iterations == 1) {
      if (++stalls >= 3) {
        rep.status = "line_search_failure";
        break;
      }
    } else {
      stalls = 0;
    }

    // Multiplier update with damping; X̂ must be positive definite.
    BlockSymMatrix xhat = std::move(in.x);
    PdalState at = st;
    at.y = in.y;
    const PdalEval ev = pdal_eval(prob, at, in.y);
    for (int i = 0; i < prob.num_blocks(); ++i) {
      Eigen::LLT<Mat> llt(xhat.blocks[i]);
      if (llt.info() != Eigen::Success) xhat.blocks[i] = ev.xbar[i];
    }
    for (int l = 0; l < prob.num_lin(); ++l) {
      if (!(xhat.lin(l) > 0.0)) xhat.lin(l) = ev.xbar_lin(l);
    }
    for (int i = 0; i < prob.num_blocks(); ++i) {
      st.mult.blocks[i] = (1.0 - cfg.gamma_lmi) * st.mult.blocks[i] + cfg.gamma_lmi * xhat.blocks[i];
    }
    st.mult.lin = (1.0 - cfg.gamma_lin) * st.mult.lin + cfg.gamma_lin * xhat.lin;
    if (st.mult.lin.size() > 0) {
      const double floor = cfg.lin_mult_floor * std::max(1.0, st.mult.lin.maxCoeff());
      st.mult.lin = st.mult.lin.cwiseMax(floor);
    }
    st.y = in.y;
    st.y_center = in.y;

    // Stop on the better of the damped and undamped multipliers.
    double e_best = std::numeric_limits<double>::infinity();
    DimacsErrors d_best;
    for (const BlockSymMatrix* cand : {&xhat, &st.mult}) {
      PrimalDualPoint pt = make_point(st.y, *cand);
      const DimacsErrors d = dimacs(prob, pt);
      const double e = pdal_error(prob, st.y, *cand);
      if (d.max() < best_err) {
        best_err = d.max();
        best = std::move(pt);
      }
      if (d.max() < d_best.max() || e_best == std::numeric_limits<double>::infinity()) d_best = d;
      e_best = std::min(e_best, e);
    }

    const double lmax = prob.num_blocks() > 0 ? lmi_lambda_max(prob, st.y) : 0.0;
    IterationRecord rec;
    rec.iter = k + 1;
    rec.cg = in.cg;
    rec.inner = in.iterations;
    rec.pi_lmi = st.pi_lmi;
    rec.pi_lin = st.pi_lin;
    rec.dimacs = d_best.max();
    rec.precond = to_string(cfg.precond);
    rec.seconds = std::chrono::duration<double>(clock::now() - ti).count();
    rep.trace.push_back(rec);
    rep.cg_total += in.cg;
    if (cfg.verbose) {
      std::fprintf(stderr,
                   "pdal %3d  e %.3e  dimacs %.3e  inner %d  cg %d  pi %.2e/%.2e  merit %.2e%s\n",
                   k + 1, e_best, d_best.max(), in.iterations, in.cg, st.pi_lmi, st.pi_lin,
                   in.merit, in.early ? "  early" : "");
    }
    if (e_best < cfg.eps || d_best.satisfied(cfg.eps_dimacs)) {
      rep.status = "converged";
      rep.converged = true;
      break;
    }
    penalty_update(st, cfg, lmax);
    tol = next_tolerance(tol);
  }

  PrimalDualPoint pt = std::move(best);
  rep.iterations = static_cast<int>(rep.trace.size());
  rep.dimacs = dimacs(prob, pt);
  rep.objective_primal = sdpa_primal_objective(prob, pt.y);
  rep.objective_dual = sdpa_dual_objective(prob, pt.x);
  rep.spectra = summarize_spectra(pt.x);
  rep.seconds = std::chrono::duration<double>(clock::now() - t0).count();
  return {std::move(pt), std::move(rep)};
}

}  // namespace lorank
