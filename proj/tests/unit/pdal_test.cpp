#include "lorank/diagnostics.hpp"
#include "lorank/ip.hpp"
#include "lorank/pdal.hpp"
#include "lorank/penalty.hpp"

#include "oracles.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>

using namespace lorank;
using namespace lorank::test;

namespace {

// y = s·1 with s doubled until every LMI block holds.
Vec feasible_y(const SdpProblem& p) {
  Vec y = Vec::Ones(p.num_vars());
  while (lmi_lambda_max(p, y) > -1e-8) y *= 2.0;
  return y;
}

}  // namespace

TEST_SUITE("penalty") {
  TEST_CASE("hyperbolic values") {
    const PenaltyFn h{PenaltyKind::hyperbolic};
    for (double pi : {0.1, 1.0, 7.0}) {
      CHECK(penalty_eval(h, 0.0, pi).value == 0.0);
      CHECK(penalty_eval(h, 0.0, pi).d1 == doctest::Approx(1.0));
      CHECK(penalty_eval(h, pi / 2, pi).value == doctest::Approx(pi));
    }
    CHECK_THROWS_AS(penalty_eval(h, 1.0, 1.0), DomainViolation);
    CHECK_THROWS_AS(penalty_eval(h, 0.5, 0.0), std::invalid_argument);
  }

  TEST_CASE("qlog values and smoothness at the junction") {
    const PenaltyFn q{PenaltyKind::qlog, 0.5};
    const double pi = 2.0;
    for (double t : {-3.0, -0.5, 0.0, 0.4, 0.99}) {
      CHECK(penalty_eval(q, t, pi).value == doctest::Approx(-pi * std::log(1.0 - t / pi)));
    }
    // Beyond the junction the extrapolation is finite past t = π.
    CHECK(std::isfinite(penalty_eval(q, 5.0, pi).value));
    const double tj = q.tau_q * pi;
    for (double eps : {1e-7, 1e-9}) {
      const PenaltyValue l = penalty_eval(q, tj - eps, pi), r = penalty_eval(q, tj + eps, pi);
      CHECK(std::abs(l.value - r.value) < 1e-6);
      CHECK(std::abs(l.d1 - r.d1) < 1e-6);
      CHECK(std::abs(l.d2 - r.d2) < 1e-6);
    }
  }

  TEST_CASE("derivatives match finite differences") {
    for (const PenaltyFn fn : {PenaltyFn{PenaltyKind::qlog, 0.5}, PenaltyFn{PenaltyKind::qlog, 0.9},
                               PenaltyFn{PenaltyKind::hyperbolic}}) {
      for (double pi : {0.3, 1.0}) {
        for (double t : {-1.0, -0.1, 0.0, 0.1, 0.2}) {
          const double h = 1e-6;
          const PenaltyValue v = penalty_eval(fn, t, pi);
          const double d1 = (penalty_eval(fn, t + h, pi).value - penalty_eval(fn, t - h, pi).value) / (2 * h);
          const double d2 = (penalty_eval(fn, t + h, pi).d1 - penalty_eval(fn, t - h, pi).d1) / (2 * h);
          CHECK(v.d1 == doctest::Approx(d1).epsilon(1e-6));
          CHECK(v.d2 == doctest::Approx(d2).epsilon(1e-5));
        }
      }
    }
  }

  TEST_CASE("Z matrix") {
    const SdpProblem& p = tru_instance(3);
    Rng rng = make_rng(61);
    const PdalState st = random_pdal_state(p, rng);
    const Mat a = lmi_value(p.block(0), st.y);
    const Mat z = z_matrix(a, st.pi_lmi);
    const Mat id = Mat::Identity(13, 13);
    CHECK((z * (st.pi_lmi * id - a) - id).norm() < 1e-11);
    CHECK_THROWS_AS(z_matrix(a, sym_eigenvalues(a).maxCoeff() - 1e-3), DomainViolation);
    CHECK((z_matrix(Mat::Zero(3, 3), 2.0) - 0.5 * Mat::Identity(3, 3)).norm() < 1e-15);
  }

  TEST_CASE("multiplier updates") {
    // A = 0: Z = I/π, X̄ = X.
    Rng rng = make_rng(62);
    const Mat x = random_spd(4, rng);
    const Mat z = z_matrix(Mat::Zero(4, 4), 3.0);
    CHECK(rel_diff(multiplier_update_lmi(z, x, 3.0), x) < 1e-14);

    // D y = d: x·φ′(0) = x.
    const SdpProblem& p = tru_instance(3);
    Vec y = Vec::Constant(p.num_vars(), 1e4);
    const Vec xl = Vec::LinSpaced(p.num_lin(), 1.0, 2.0);
    const Vec u = multiplier_update_lin(p, y, xl, 0.7, PenaltyFn{});
    for (int l = 0; l < 36; ++l) CHECK(u(l) == doctest::Approx(xl(l)));
    // Scalar: t = −π/2 for hyperbolic gives φ′ = 1/(1.5)².
    Vec y2 = Vec::Constant(p.num_vars(), 0.35);
    const Vec u2 = multiplier_update_lin(p, y2, Vec::Ones(p.num_lin()), 0.7,
                                         PenaltyFn{PenaltyKind::hyperbolic});
    CHECK(u2(36) == doctest::Approx(1.0 / (1.5 * 1.5)));
  }

  TEST_CASE("V = πZ has eigenvalues in (0, 1] at feasible y") {
    for (const SdpProblem* p : {&tru_instance(3), &vib_instance(3)}) {
      const Vec y = feasible_y(*p);
      for (double pi : {1e-3, 0.5, 10.0}) {
        for (int i = 0; i < p->num_blocks(); ++i) {
          const Vec e = sym_eigenvalues(Mat(pi * z_matrix(lmi_value(p->block(i), y), pi)));
          CHECK(e(0) > 0.0);
          CHECK(e.maxCoeff() <= 1.0 + 1e-12);
        }
      }
    }
  }
}

TEST_SUITE("pdal") {
  TEST_CASE("gradient against finite differences") {
    Rng rng = make_rng(63);
    for (const SdpProblem* p : {&tru_instance(3), &vib_instance(3), &tru_instance(3, true)}) {
      for (int t = 0; t < 3; ++t) {
        const PdalState st = random_pdal_state(*p, rng);
        CHECK(pdal_gradient_fd_error(*p, st) < 1e-5);
      }
    }
  }

  TEST_CASE("Hessian matvec against the Kronecker oracle") {
    Rng rng = make_rng(64);
    for (const SdpProblem* p : {&tru_instance(3), &vib_instance(3)}) {
      const PdalState st = random_pdal_state(*p, rng);
      const PdalEval ev = pdal_eval(*p, st, st.y);
      CHECK(hessian_matvec_error(*p, st, ev, rng) < 1e-9);
      CHECK(rel_diff(dense_pdal_hessian(*p, st, ev), kron_pdal_hessian(*p, st, ev)) < 1e-9);
      const Mat h = kron_pdal_hessian(*p, st, ev);
      CHECK(rel_diff(hessian_lin_diag(*p, st, ev),
                     Vec(Vec::Constant(p->num_vars(), st.r) +
                         lin_congruence(*p, ev.wbar).diagonal())) < 1e-14);
      // Second derivative of F along a random direction.
      const Vec d = random_vec(p->num_vars(), rng);
      const double hh = 1e-6;
      const Vec gp = aug_lagrangian_grad(*p, st, Vec(st.y + hh * d));
      const Vec gm = aug_lagrangian_grad(*p, st, Vec(st.y - hh * d));
      CHECK(rel_diff(Vec((gp - gm) / (2 * hh)), Vec(h * d)) < 1e-5);
    }
  }

  TEST_CASE("Hessian eigenvalues stay above r") {
    Rng rng = make_rng(65);
    for (const SdpProblem* p : {&tru_instance(3), &vib_instance(3)}) {
      for (double r : {1e-2, 1e-4}) {
        PdalState st = random_pdal_state(*p, rng);
        st.r = r;
        const PdalEval ev = pdal_eval(*p, st, st.y);
        CHECK(sym_eigenvalues(dense_pdal_hessian(*p, st, ev))(0) >= r * (1.0 - 1e-8));
      }
    }
  }

  TEST_CASE("residuals and merit") {
    Rng rng = make_rng(66);
    const SdpProblem& p = tru_instance(3);
    const PdalState st = random_pdal_state(p, rng);
    const PdalEval ev = pdal_eval(p, st, st.y);
    const BlockSymMatrix xbar{ev.xbar, ev.xbar_lin};
    const PdResiduals r0 = pd_residuals(p, st, ev, st.y, xbar);
    CHECK(r0.g2.blocks[0].norm() == 0.0);
    CHECK(r0.g2.lin.norm() == 0.0);
    CHECK(rel_diff(r0.g1, aug_lagrangian_grad(p, st, ev)) < 1e-13);

    PdResiduals zero{Vec::Zero(36), BlockSymMatrix::zeros_like(p)};
    CHECK(merit(zero) == 0.0);
    const PdResiduals r1 = pd_residuals(p, st, ev, st.y, st.mult);
    PdResiduals r2 = r1;
    r2.g1 *= 2.0;
    r2.g2.blocks[0] *= 2.0;
    r2.g2.lin *= 2.0;
    CHECK(merit(r2) == doctest::Approx(4.0 * merit(r1)));

    // Dense evaluation.
    const Mat a = lmi_value(p.block(0), st.y);
    const Mat zd = (st.pi_lmi * Mat::Identity(13, 13) - a).inverse();
    const Mat xb = st.pi_lmi * st.pi_lmi * zd * st.mult.blocks[0] * zd;
    CHECK(rel_diff(r1.g2.blocks[0], Mat(st.mult.blocks[0] - xb)) < 1e-10);
  }

  TEST_CASE("merit directional derivative") {
    Rng rng = make_rng(67);
    for (const SdpProblem* p : {&tru_instance(3), &vib_instance(3)}) {
      const PdalState st = random_pdal_state(*p, rng);
      const PdalEval ev = pdal_eval(*p, st, st.y);
      const BlockSymMatrix& xh = st.mult;
      const PdResiduals res = pd_residuals(*p, st, ev, st.y, xh);
      const Vec dy = 0.01 * random_vec(p->num_vars(), rng);
      BlockSymMatrix dx = BlockSymMatrix::zeros_like(*p);
      for (int i = 0; i < p->num_blocks(); ++i) dx.blocks[i] = random_sym(p->block_dim(i), rng);
      dx.lin = random_vec(p->num_lin(), rng);
      auto m_at = [&](double a) {
        PdalState s2 = st;
        s2.y = st.y + a * dy;
        const PdalEval e2 = pdal_eval(*p, s2, s2.y);
        BlockSymMatrix x2 = xh;
        x2.axpy(a, dx);
        return merit(pd_residuals(*p, s2, e2, s2.y, x2));
      };
      const double h = 1e-6;
      const double fd = (m_at(h) - m_at(-h)) / (2 * h);
      const double an = merit_dderiv(*p, st, ev, res, dy, dx);
      CHECK(an == doctest::Approx(fd).epsilon(1e-6));
    }
  }

  TEST_CASE("Newton step") {
    Rng rng = make_rng(68);
    const SdpProblem& p = tru_instance(3);
    const PdalState st = random_pdal_state(p, rng);
    const PdalEval ev = pdal_eval(p, st, st.y);
    PcgOptions o;
    o.tol = 1e-8;
    const PdDirection d = pd_newton_step(p, st, ev, st.mult, nullptr, o);
    CHECK(d.cg.ok());
    const PdResiduals res = pd_residuals(p, st, ev, st.y, st.mult);
    // Linearized G1 and G2 vanish up to the CG tolerance.
    const Vec g1 = res.g1 + st.r * d.dy + apply_A(p, d.dx);
    CHECK(g1.norm() <= 10.0 * o.tol * aug_lagrangian_grad(p, st, ev).norm());
    const BlockSymMatrix dxbar = pd_dual_direction(p, ev, st.mult, d.dy);
    BlockSymMatrix g2 = res.g2;
    g2.axpy(1.0, d.dx);
    for (int i = 0; i < p.num_blocks(); ++i) {
      const Mat hm = block_adjoint(p.block(i), d.dy);
      const Mat q = ev.xbar[i] * hm * ev.z[i];
      CHECK((g2.blocks[i] - (q + q.transpose())).norm() < 1e-10 * std::max(1.0, g2.blocks[i].norm()));
    }
    CHECK(rel_diff(dxbar.blocks[0], d.dx.blocks[0]) < 1e-14);
    // The merit decreases along the step.
    CHECK(merit_dderiv(p, st, ev, res, d.dy, d.dx) < 0.0);

    // Zero gradient: Δy = 0 and ΔX = X̄ − X̂.
    PdalState s0 = st;
    PdalEval e0 = ev;
    const Vec g = aug_lagrangian_grad(p, s0, e0);
    s0.y_center = st.y_center + g / s0.r;
    CHECK(aug_lagrangian_grad(p, s0, e0).norm() < 1e-9 * std::max(1.0, g.norm()));
    const PdDirection d0 = pd_newton_step(p, s0, e0, st.mult, nullptr, o);
    CHECK(d0.dy.norm() < 1e-8);
    CHECK(rel_diff(d0.dx.blocks[0], Mat(ev.xbar[0] - st.mult.blocks[0])) < 1e-8);
  }

  TEST_CASE("one-variable closed form") {
    // F(y) = −b y + X·(π²/(π − a y + c) − π) + (r/2)(y − ȳ)² on the toy problem.
    const SdpProblem p = toy_problem();
    PdalConfig cfg;
    PdalState st = pdal_initial_state(p, cfg);
    st.y(0) = 0.5;
    st.y_center(0) = 0.2;
    st.pi_lmi = 2.0;
    st.mult.blocks[0](0, 0) = 3.0;
    const PdalEval ev = pdal_eval(p, st, st.y);
    // A(y) − C = −y + 1 = 0.5, Z = 1/1.5.
    CHECK(ev.z[0](0, 0) == doctest::Approx(1.0 / 1.5));
    const double xbar = 4.0 * 3.0 / (1.5 * 1.5);
    CHECK(ev.xbar[0](0, 0) == doctest::Approx(xbar));
    const double grad = 1.0 + st.r * 0.3 - xbar;
    CHECK(aug_lagrangian_grad(p, st, ev)(0) == doctest::Approx(grad));
    const double hess = st.r + 2.0 * xbar / 1.5;
    CHECK(hessian_matvec(p, st, ev, Vec::Ones(1))(0) == doctest::Approx(hess));
    PcgOptions o;
    o.tol = 1e-14;
    const PdDirection d = pd_newton_step(p, st, ev, st.mult, nullptr, o);
    CHECK(d.dy(0) == doctest::Approx(-grad / hess));
  }

  TEST_CASE("penalty update arithmetic") {
    PdalConfig cfg;
    cfg.pi_lmi_upd = 0.1;
    cfg.pi_lmi_min = 1e-5;
    PdalState st;
    st.pi_lmi = 1.0;
    st.pi_lin = 1.0;
    penalty_update(st, cfg, 0.5);
    CHECK(st.pi_lmi == doctest::Approx(0.505));
    CHECK(st.pi_lin == doctest::Approx(0.5));
    st.pi_lmi = cfg.pi_lmi_min;
    st.pi_lin = cfg.pi_lin_min;
    penalty_update(st, cfg, -1.0);
    CHECK(st.pi_lmi == cfg.pi_lmi_min);
    CHECK(st.pi_lin == cfg.pi_lin_min);
  }

  TEST_CASE("config") {
    const PdalConfig t = PdalConfig::tru(), v = PdalConfig::vib();
    CHECK(t.pi_lin_min == 1e-9);
    CHECK(t.lin_penalty.tau_q == 0.5);
    CHECK(v.pi_lin_min == 1e-11);
    CHECK(v.gamma_lmi == 0.8);
    CHECK(v.lin_penalty.tau_q == 0.9);
    const PdalConfig j = pdal_config_from_json(R"({"r": 0.05, "tau_q": 0.7})", t);
    CHECK(j.r == 0.05);
    CHECK(j.lin_penalty.tau_q == 0.7);
    CHECK_THROWS_AS(pdal_config_from_json(R"({"rho": 1})", t), std::invalid_argument);
    CHECK_THROWS_AS(pdal_config_from_json(R"({"pi_lin_upd": 1.5})", t), std::invalid_argument);
    CHECK_THROWS_AS(pdal_config_from_json("[1]", t), std::invalid_argument);
    PdalConfig bad = t;
    bad.precond = PrecondKind::alpha;
    CHECK_THROWS_AS(validate(bad), std::invalid_argument);
  }

  TEST_CASE("inner solve") {
    const SdpProblem p = toy_problem();
    PdalConfig cfg;
    PdalState st = pdal_initial_state(p, cfg);
    st.y(0) = 1.0;
    st.y_center(0) = 1.0;
    st.mult.blocks[0](0, 0) = 1.0;
    st.pi_lmi = 0.5;
    const InnerResult at_opt = inner_solve(p, st, 1e-12, cfg, 1e-10);
    CHECK(at_opt.converged);
    CHECK(at_opt.iterations == 0);

    st.y(0) = 3.0;
    st.y_center(0) = 3.0;
    st.pi_lmi = 3.0;
    const InnerResult r = inner_solve(p, st, 1e-14, cfg, 1e-12);
    CHECK((r.converged || r.early));
    CHECK_FALSE(r.stalled);
    REQUIRE(r.merit_trace.size() >= 2);
    for (std::size_t i = 1; i < r.merit_trace.size(); ++i) {
      CHECK(r.merit_trace[i] < r.merit_trace[i - 1]);
    }
    CHECK(r.merit_trace.back() < r.merit_trace.front());
  }

  TEST_CASE("toy solve") {
    const auto [pt, rep] = pdal_solve(toy_problem());
    CHECK(rep.converged);
    CHECK(rep.objective_primal == doctest::Approx(1.0).epsilon(1e-4));
  }

  TEST_CASE("tru3 solve") {
    const SdpProblem& p = tru_instance(3);
    const auto [pt, rep] = pdal_solve(p);
    REQUIRE(rep.converged);
    CHECK(rep.dimacs.max() <= 1e-5);
    CHECK(rep.iterations <= 70);
    const auto [ipt, irep] = ip_solve(p);
    CHECK(std::abs(rep.objective_primal - irep.objective_primal) <=
          1e-4 * std::abs(irep.objective_primal));

    // π is non-increasing apart from the λ_max floor.
    for (std::size_t i = 1; i < rep.trace.size(); ++i) {
      CHECK(rep.trace[i].pi_lin <= rep.trace[i - 1].pi_lin);
    }
    // Late outer iterations need at most two Newton steps.
    for (std::size_t i = rep.trace.size() - 4; i < rep.trace.size(); ++i) {
      CHECK(rep.trace[i].inner <= 2);
    }

    // Multiplier fixed point at the solution. The residual is the
    // complementarity error divided by π, so it shrinks as π grows.
    double prev = 1e300;
    for (double pi : {0.1, 1.0, 10.0}) {
      const Mat z = z_matrix(lmi_value(p.block(0), pt.y), pi);
      const Mat xb = multiplier_update_lmi(z, pt.x.blocks[0], pi);
      const double rel = (xb - pt.x.blocks[0]).norm() / pt.x.blocks[0].norm();
      CAPTURE(pi);
      CHECK(rel <= 1e-4 / pi);
      CHECK(rel < prev);
      prev = rel;
    }
  }

  TEST_CASE("every penalty-solver preconditioner on tru3") {
    const SdpProblem& p = tru_instance(3);
    for (auto k : {PrecondKind::gamma, PrecondKind::delta, PrecondKind::beta, PrecondKind::tilde,
                   PrecondKind::none}) {
      PdalConfig c;
      c.precond = k;
      const auto [pt, rep] = pdal_solve(p, c);
      CAPTURE(to_string(k));
      CHECK(rep.converged);
      CHECK(rep.objective_primal == doctest::Approx(25.0).epsilon(1e-4));
    }
  }
}
