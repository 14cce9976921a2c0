#include "lorank/ip.hpp"
#include "lorank/linalg.hpp"
#include "lorank/pdal.hpp"
#include "lorank/precond.hpp"
#include "lorank/truss.hpp"

#include <benchmark/benchmark.h>

#include <random>

using namespace lorank;

namespace {

SdpProblem truss(int g, TrussVariant v) { return assemble_truss_sdp(gen_ground(g, v), TrussSdpSpec{}); }

void BM_schur_matvec(benchmark::State& state) {
  const SdpProblem p = truss(static_cast<int>(state.range(0)), TrussVariant::tru);
  const IpState st = make_ip_state(p, ip_initial_point(p));
  const Vec v = Vec::Ones(p.num_vars());
  for (auto _ : state) benchmark::DoNotOptimize(schur_matvec(p, st, v));
}
BENCHMARK(BM_schur_matvec)->Arg(3)->Arg(5)->Arg(7);

void BM_hessian_matvec(benchmark::State& state) {
  const SdpProblem p = truss(static_cast<int>(state.range(0)), TrussVariant::tru);
  const PdalConfig cfg;
  const PdalState st = pdal_initial_state(p, cfg);
  const PdalEval ev = pdal_eval(p, st, st.y);
  const Vec v = Vec::Ones(p.num_vars());
  for (auto _ : state) benchmark::DoNotOptimize(hessian_matvec(p, st, ev, v));
}
BENCHMARK(BM_hessian_matvec)->Arg(3)->Arg(5)->Arg(7);

void BM_smw_apply(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::mt19937_64 rng(7);
  std::normal_distribution<double> nd;
  Vec base = Vec::Constant(n, 2.0);
  Mat v(n, 10);
  for (int i = 0; i < v.size(); ++i) v.data()[i] = nd(rng);
  const SmwPreconditioner pc(base, v);
  const Vec r = Vec::Ones(n);
  for (auto _ : state) benchmark::DoNotOptimize(pc.apply_inv(r));
}
BENCHMARK(BM_smw_apply)->Arg(300)->Arg(3240);

void BM_sym_eig(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  std::mt19937_64 rng(11);
  std::normal_distribution<double> nd;
  Mat a(m, m);
  for (int i = 0; i < a.size(); ++i) a.data()[i] = nd(rng);
  const Mat s = symmetrize(a);
  for (auto _ : state) benchmark::DoNotOptimize(sym_eig(s));
}
BENCHMARK(BM_sym_eig)->Arg(41)->Arg(145);

}  // namespace

BENCHMARK_MAIN();
