#include "lorank/diagnostics.hpp"
#include "lorank/ip.hpp"
#include "lorank/nt_scaling.hpp"
#include "lorank/pdal.hpp"
#include "lorank/truss.hpp"

#include "oracles.hpp"
#include "support.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

using namespace lorank;
using namespace lorank::test;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

PdalConfig pdal_for(const SdpProblem& p) {
  return p.num_blocks() > 1 ? PdalConfig::vib() : PdalConfig::tru();
}

// Cross-solver agreement at DIMACS 1e-5 within 60 s.
Outcome criterion1() {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o{true, ""};
  const std::vector<std::pair<std::string, const SdpProblem*>> cases = {
      {"tru3", &tru_instance(3)},
      {"tru5", &tru_instance(5)},
      {"tru3e", &tru_instance(3, true)},
      {"vib3", &vib_instance(3)}};
  for (const auto& [name, p] : cases) {
    const auto [ipt, ir] = ip_solve(*p);
    const auto [ppt, pr] = pdal_solve(*p, pdal_for(*p));
    const double rel = std::abs(ir.objective_primal - pr.objective_primal) /
                       std::max(1.0, std::abs(ir.objective_primal));
    const bool ok = ir.dimacs.max() <= 1e-5 && pr.dimacs.max() <= 1e-5 && rel <= 1e-4;
    o.pass = o.pass && ok;
    o.detail += name + " rel=" + fmt("%.2e", rel) + " ip=" + fmt("%.1e", ir.dimacs.max()) +
                " pdal=" + fmt("%.1e", pr.dimacs.max()) + "; ";
  }
  const double s = seconds_since(t0);
  o.pass = o.pass && s <= 60.0;
  o.detail += "time=" + fmt("%.1f", s) + "s";
  return o;
}

// Rank-one dual structure from a tightly converged IP solve.
Outcome criterion2() {
  IpConfig c;
  c.eps_dimacs = 1e-9;
  c.cg_tol.floor = 1e-12;
  const auto [pe, re] = ip_solve(tru_instance(3, true), c);
  const auto [p0, r0] = ip_solve(tru_instance(3), c);
  const Vec le = sym_eigenvalues(pe.x.blocks[0]).reverse();
  const Vec l0 = sym_eigenvalues(p0.x.blocks[0]).reverse();
  const double gap_e = le(0) / std::abs(le(1));
  const double trail0 = l0(1) / l0(0);
  const double gap0 = l0(0) / std::abs(l0(1));
  Outcome o;
  o.pass = gap_e >= 1e6 && trail0 >= 1e-3 && gap0 > 1.0;
  o.detail = "tru3e l1/l2=" + fmt("%.3e", gap_e) + " tru3 l2/l1=" + fmt("%.3e", trail0) +
             " (tru3e dimacs " + fmt("%.1e", re.dimacs.max()) + ", tru3 dimacs " +
             fmt("%.1e", r0.dimacs.max()) + ")";
  return o;
}

// CG work of hybrid vs none on tru5.
Outcome criterion3() {
  const SdpProblem& p = tru_instance(5);
  IpConfig none;
  none.precond = PrecondKind::none;
  IpConfig hyb;
  const auto [a, ra] = ip_solve(p, none);
  const auto [b, rb] = ip_solve(p, hyb);
  const double ratio = static_cast<double>(rb.cg_total) / std::max(1, ra.cg_total);
  Outcome o;
  o.pass = ra.converged && rb.converged && ratio <= 0.5;
  o.detail = "hybrid=" + std::to_string(rb.cg_total) + " none=" + std::to_string(ra.cg_total) +
             " ratio=" + fmt("%.3f", ratio) + (ratio <= 0.2 ? " (meets 0.2 target)" : " (above 0.2 target)");
  return o;
}

// Iteration envelope on tru3.
Outcome criterion4() {
  const auto [a, ri] = ip_solve(tru_instance(3));
  const auto [b, rp] = pdal_solve(tru_instance(3));
  Outcome o;
  o.pass = ri.converged && rp.converged && ri.iterations <= 32 && rp.iterations <= 70;
  o.detail = "ip=" + std::to_string(ri.iterations) + " (<=32) pdal=" +
             std::to_string(rp.iterations) + " (<=70)";
  return o;
}

// Condition number bound for H_alpha along a dense-diagnostic IP run.
Outcome criterion5() {
  IpConfig c;
  c.precond = PrecondKind::alpha;
  c.rank.k = {11};
  std::vector<ConditionBound> rec;
  c.observer = [&](const IpIterationView& v) {
    rec.push_back(alpha_condition_bound(v.prob, v.state, ip_splits(v.state, c.rank, c.tau_rule)));
  };
  const auto [pt, rep] = ip_solve(tru_instance(3), c);
  int holding = 0;
  for (const auto& cb : rec) holding += cb.holds() ? 1 : 0;
  double last5 = 0.0;
  for (std::size_t i = rec.size() >= 5 ? rec.size() - 5 : 0; i < rec.size(); ++i) {
    last5 = std::max(last5, rec[i].kappa);
  }
  Outcome o;
  o.pass = rep.converged && holding >= 10 && holding == static_cast<int>(rec.size()) &&
           rec.size() >= 5 && last5 <= 1e3;
  o.detail = "bound holds at " + std::to_string(holding) + "/" + std::to_string(rec.size()) +
             " iterations, max kappa over last 5=" + fmt("%.3e", last5);
  return o;
}

// Oracle equivalences on 50 random states.
Outcome criterion6() {
  Rng rng = make_rng(601);
  double schur = 0, hess = 0, smw = 0, nt = 0, grad = 0;
  const std::vector<const SdpProblem*> probs = {&tru_instance(3), &vib_instance(3),
                                                &tru_instance(5)};
  for (int s = 0; s < 50; ++s) {
    const SdpProblem& p = *probs[s % probs.size()];
    const IpState ist = random_ip_state(p, rng);
    schur = std::max(schur, schur_matvec_error(p, ist, rng, 2));
    const PdalState pst = random_pdal_state(p, rng);
    const PdalEval ev = pdal_eval(p, pst, pst.y);
    hess = std::max(hess, hessian_matvec_error(p, pst, ev, rng, 2));
    smw = std::max(smw, s % 2 ? smw_inverse_error(40 + s, 1 + s % 5, rng)
                              : smw_sparse_inverse_error(40 + s, 1 + s % 5, rng));
    nt = std::max(nt, nt_identity_error(2 + s % 12, rng));
    if (s % 5 == 0) grad = std::max(grad, pdal_gradient_fd_error(p, pst));
  }
  Outcome o;
  o.pass = schur <= 1e-9 && hess <= 1e-9 && smw <= 1e-8 && nt <= 1e-9 && grad <= 1e-5;
  o.detail = "schur=" + fmt("%.1e", schur) + " hessian=" + fmt("%.1e", hess) + " smw=" +
             fmt("%.1e", smw) + " nt=" + fmt("%.1e", nt) + " gradient=" + fmt("%.1e", grad);
  return o;
}

// Spectral properties on planted-rank instances and the CG outlier bound.
Outcome criterion7() {
  Rng rng = make_rng(701);
  Outcome o{true, ""};
  int fails = 0, checks = 0;
  std::string failed;
  auto check = [&](bool ok, const std::string& what) {
    ++checks;
    if (!ok) {
      ++fails;
      failed += " " + what;
    }
  };
  for (int m = 4; m <= 8; ++m) {
    for (int k = 1; k <= std::min(3, m - 2); ++k) {
      const std::string tag = "(m=" + std::to_string(m) + ",k=" + std::to_string(k) + ")";
      check(nt_outlier_count(m, k, 1e-8, rng) == k, "nt" + tag);
      const Mat x = random_rank_k(m, k, rng);
      check(numerical_rank(singular_values(kron(x, x))) == k * k, "kron" + tag);
      const Mat a = random_sym(m, rng);
      check(numerical_rank(singular_values(Mat(a * x * a.transpose()))) <= k, "congruence" + tag);
      const int n = k * k + 4;
      check(schur_outlier_gap(m, n, k, rng) >= 1, "gap" + tag);
      check(schur_rank_exact(m, n, k, rng) == std::min(n, k * (k + 1) / 2), "rank" + tag);
    }
  }
  double worst = 0.0, plain = 0.0;
  for (int k : {1, 2, 5}) {
    const CgBoundCheck cb = cg_outlier_bound(50, k, rng);
    check(cb.checked > 0 && cb.holds() && cb.tracking < 1e-3, "cg(k=" + std::to_string(k) + ")");
    worst = std::max(worst, cb.worst_ratio);
    plain = std::max(plain, cb.plain_ratio);
  }
  o.pass = fails == 0;
  o.detail = std::to_string(checks - fails) + "/" + std::to_string(checks) +
             " checks, CG error/bound max=" + fmt("%.3f", worst) +
             " (floating-point recurrence " + fmt("%.1e", plain) + ")" +
             (failed.empty() ? "" : "; failed:" + failed);
  return o;
}

// Hessian eigenvalue floor on diagnostic states.
Outcome criterion8() {
  int states = 0, below = 0;
  double worst = 1e300, deficit = 0.0;
  auto record = [&](const PdalIterationView& v) {
    const HessianFloor f = hessian_floor(dense_pdal_hessian(v.prob, v.state, v.eval), v.state.r);
    ++states;
    worst = std::min(worst, f.lambda_min / f.r);
    if (f.lambda_min < f.r) deficit = std::max(deficit, (f.r - f.lambda_min) / f.slack);
    if (!f.holds()) ++below;
  };
  for (const SdpProblem* p :
       {&tru_instance(3), &vib_instance(3), &tru_instance(3, true), &vib_instance(3, true)}) {
    PdalConfig c = pdal_for(*p);
    c.observer = record;
    pdal_solve(*p, c);
  }
  Rng rng = make_rng(801);
  for (int s = 0; s < 20; ++s) {
    const SdpProblem& p = s % 2 ? tru_instance(3) : vib_instance(3);
    PdalState st = random_pdal_state(p, rng);
    const PdalEval ev = pdal_eval(p, st, st.y);
    record(PdalIterationView{p, st, ev, nullptr});
  }
  Outcome o;
  o.pass = states > 0 && below == 0;
  o.detail = std::to_string(states) + " states, min lambda_min/r=" + fmt("%.6f", worst) +
             ", max shortfall/eigensolver slack=" + fmt("%.3f", deficit);
  return o;
}

// Generator dimensions.
Outcome criterion9() {
  struct Row {
    int g, n, m, lin;
  };
  Outcome o{true, ""};
  for (const Row r : {Row{3, 36, 13, 72}, Row{5, 300, 41, 600}, Row{7, 1176, 85, 2352},
                      Row{9, 3240, 145, 6480}}) {
    for (auto var : {TrussVariant::tru, TrussVariant::vib}) {
      const GroundStructure gs = gen_ground(r.g, var);
      const SdpProblem p = assemble_truss_sdp(gs, TrussSdpSpec{});
      bool ok = p.num_vars() == r.n && p.block_dim(0) == r.m && p.num_lin() == r.lin;
      if (var == TrussVariant::vib) {
        ok = ok && p.num_blocks() == 2 && p.block_dim(1) == r.m - 1;
      } else {
        ok = ok && p.num_blocks() == 1;
      }
      o.pass = o.pass && ok;
      o.detail += to_string(var) + std::to_string(r.g) + (ok ? " ok " : " MISMATCH ");
    }
  }
  return o;
}

}  // namespace

int main() {
  const std::vector<std::function<Outcome()>> crit = {criterion1, criterion2, criterion3,
                                                      criterion4, criterion5, criterion6,
                                                      criterion7, criterion8, criterion9};
  int failed = 0;
  for (std::size_t i = 0; i < crit.size(); ++i) {
    Outcome o;
    try {
      o = crit[i]();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::printf("criterion %zu: %s  %s\n", i + 1, o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
