#include "support.hpp"

#include <Eigen/QR>

#include <cstdlib>
#include <map>
#include <mutex>
#include <set>
#include <tuple>
#include <utility>

namespace lorank::test {

std::uint64_t base_seed() {
  if (const char* s = std::getenv("LORANK_TEST_SEED")) return std::strtoull(s, nullptr, 10);
  return 20240917ULL;
}

Rng make_rng(std::uint64_t salt) { return Rng(base_seed() ^ (salt * 0x9e3779b97f4a7c15ULL)); }

Vec random_vec(int n, Rng& rng) {
  std::normal_distribution<double> nd;
  Vec v(n);
  for (int i = 0; i < n; ++i) v(i) = nd(rng);
  return v;
}

Mat random_sym(int m, Rng& rng) {
  std::normal_distribution<double> nd;
  Mat a(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) a(i, j) = nd(rng);
  return 0.5 * (a + a.transpose());
}

Mat random_orthogonal(int m, Rng& rng) {
  std::normal_distribution<double> nd;
  Mat a(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) a(i, j) = nd(rng);
  Eigen::HouseholderQR<Mat> qr(a);
  return qr.householderQ() * Mat::Identity(m, m);
}

Mat planted(const Vec& eigs, Rng& rng) {
  const Mat q = random_orthogonal(static_cast<int>(eigs.size()), rng);
  Mat a = q * eigs.asDiagonal() * q.transpose();
  return 0.5 * (a + a.transpose());
}

Mat random_spd(int m, Rng& rng, double lo, double hi) {
  std::uniform_real_distribution<double> ud(lo, hi);
  Vec e(m);
  for (int i = 0; i < m; ++i) e(i) = ud(rng);
  return planted(e, rng);
}

Mat random_rank_k(int m, int k, Rng& rng) {
  std::normal_distribution<double> nd;
  Mat g(m, k);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < k; ++j) g(i, j) = nd(rng);
  return g * g.transpose();
}

Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

double rel_diff(const Mat& a, const Mat& b) {
  const double s = std::max(a.norm(), b.norm());
  return s == 0.0 ? 0.0 : (a - b).norm() / s;
}

double rel_diff(const Vec& a, const Vec& b) {
  const double s = std::max(a.norm(), b.norm());
  return s == 0.0 ? 0.0 : (a - b).norm() / s;
}

SdpProblem toy_problem() {
  LmiBlock blk;
  blk.dim = 1;
  blk.objective = SparseSym(1, {{0, 0, -1.0}});
  blk.constraints = {SparseSym(1, {{0, 0, -1.0}})};
  Vec b(1);
  b << -1.0;
  return SdpProblem(b, {blk}, SpMat(0, 1), Vec());
}

SdpProblem random_problem(int n, const std::vector<int>& dims, int lin, Rng& rng) {
  std::normal_distribution<double> nd;
  std::uniform_real_distribution<double> ud(0.5, 1.5);
  std::vector<LmiBlock> blocks;
  BlockSymMatrix x0;
  for (int m : dims) {
    LmiBlock blk;
    blk.dim = m;
    std::uniform_int_distribution<int> pick(0, m - 1);
    for (int j = 0; j < n; ++j) {
      std::set<std::pair<int, int>> used;
      std::vector<SparseSym::Entry> e;
      const int cnt = std::min(3, m * (m + 1) / 2);
      while (static_cast<int>(e.size()) < cnt) {
        int r = pick(rng), c = pick(rng);
        if (r < c) std::swap(r, c);
        if (!used.insert({r, c}).second) continue;
        e.push_back({r, c, nd(rng)});
      }
      blk.constraints.emplace_back(m, std::move(e));
    }
    const Mat cm = random_spd(m, rng, 1.0, 2.0);
    std::vector<SparseSym::Entry> ce;
    for (int r = 0; r < m; ++r)
      for (int c = 0; c <= r; ++c) ce.push_back({r, c, cm(r, c)});
    blk.objective = SparseSym(m, std::move(ce));
    blocks.push_back(std::move(blk));
    x0.blocks.push_back(random_spd(m, rng));
  }
  std::vector<Eigen::Triplet<double>> trip;
  std::uniform_int_distribution<int> col(0, n - 1);
  for (int l = 0; l < lin; ++l) {
    std::set<int> cols;
    while (cols.size() < 2) cols.insert(col(rng));
    for (int c : cols) trip.emplace_back(l, c, nd(rng));
  }
  SpMat dm(lin, n);
  dm.setFromTriplets(trip.begin(), trip.end());
  Vec d(lin);
  x0.lin.resize(lin);
  for (int l = 0; l < lin; ++l) {
    d(l) = ud(rng);
    x0.lin(l) = ud(rng);
  }
  // b = A(X0) + Dᵀx0 for strictly feasible X0, x0.
  Vec b = Vec::Zero(n);
  for (std::size_t i = 0; i < blocks.size(); ++i) b += block_apply(blocks[i], x0.blocks[i]);
  if (lin > 0) b += dm.transpose() * x0.lin;
  return SdpProblem(b, std::move(blocks), std::move(dm), std::move(d));
}

namespace {

const SdpProblem& cached(TrussVariant v, int g, bool e) {
  static std::mutex mu;
  static std::map<std::tuple<int, int, bool>, SdpProblem> cache;
  std::lock_guard<std::mutex> lock(mu);
  const auto key = std::make_tuple(static_cast<int>(v), g, e);
  auto it = cache.find(key);
  if (it == cache.end()) {
    TrussSdpSpec spec;
    spec.t_lower = e ? 1e-4 : 0.0;
    it = cache.emplace(key, assemble_truss_sdp(gen_ground(g, v), spec)).first;
  }
  return it->second;
}

}  // namespace

const SdpProblem& tru_instance(int g, bool e) { return cached(TrussVariant::tru, g, e); }
const SdpProblem& vib_instance(int g, bool e) { return cached(TrussVariant::vib, g, e); }

IpState random_ip_state(const SdpProblem& prob, Rng& rng) {
  std::uniform_real_distribution<double> ud(0.2, 3.0);
  PrimalDualPoint pt;
  pt.y = random_vec(prob.num_vars(), rng);
  pt.x = BlockSymMatrix::zeros_like(prob);
  pt.s = BlockSymMatrix::zeros_like(prob);
  for (int i = 0; i < prob.num_blocks(); ++i) {
    pt.x.blocks[i] = random_spd(prob.block_dim(i), rng, 0.1, 5.0);
    pt.s.blocks[i] = random_spd(prob.block_dim(i), rng, 0.1, 5.0);
  }
  for (int l = 0; l < prob.num_lin(); ++l) {
    pt.x.lin(l) = ud(rng);
    pt.s.lin(l) = ud(rng);
  }
  return make_ip_state(prob, std::move(pt));
}

PdalState random_pdal_state(const SdpProblem& prob, Rng& rng, const PdalConfig& cfg) {
  std::uniform_real_distribution<double> ud(0.1, 1.0);
  PdalState st = pdal_initial_state(prob, cfg);
  for (int j = 0; j < prob.num_vars(); ++j) st.y(j) = ud(rng);
  st.y_center = st.y + 0.1 * random_vec(prob.num_vars(), rng);
  const double lm = prob.num_blocks() > 0 ? lmi_lambda_max(prob, st.y) : 0.0;
  st.pi_lmi = std::max(lm, 0.0) + 0.2 + ud(rng);
  st.pi_lin = ud(rng);
  for (int i = 0; i < prob.num_blocks(); ++i) {
    st.mult.blocks[i] = random_spd(prob.block_dim(i), rng, 0.1, 2.0);
  }
  for (int l = 0; l < prob.num_lin(); ++l) st.mult.lin(l) = ud(rng);
  return st;
}

}  // namespace lorank::test
