#include "lorank/truss.hpp"

#include <json.hpp>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lorank {

std::string to_string(TrussVariant v) { return v == TrussVariant::tru ? "tru" : "vib"; }

TrussVariant parse_truss_variant(const std::string& name) {
  if (name == "tru") return TrussVariant::tru;
  if (name == "vib") return TrussVariant::vib;
  throw std::invalid_argument("unknown truss family '" + name + "'");
}

GroundStructure gen_ground(int g, TrussVariant variant) {
  if (g < 2) throw std::invalid_argument("grid size must be at least 2");
  GroundStructure gs;
  gs.g = g;
  gs.variant = variant;
  const int nn = g * g;
  gs.node_dof.assign(2 * nn, -1);
  // Node (i, j) at x = i, y = j, numbered i·g + j.
  for (int i = 0; i < g; ++i) {
    for (int j = 0; j < g; ++j) {
      gs.nodes.push_back({static_cast<double>(i), static_cast<double>(j)});
      if (i > 0) {
        gs.node_dof[2 * (i * g + j)] = gs.dof++;
        gs.node_dof[2 * (i * g + j) + 1] = gs.dof++;
      }
    }
  }
  for (int a = 0; a < nn; ++a) {
    for (int b = a + 1; b < nn; ++b) {
      Bar bar;
      bar.a = a;
      bar.b = b;
      const double dx = gs.nodes[b][0] - gs.nodes[a][0];
      const double dy = gs.nodes[b][1] - gs.nodes[a][1];
      bar.length = std::hypot(dx, dy);
      const double c = dx / bar.length, s = dy / bar.length;
      bar.cosines = {-c, -s, c, s};
      bar.dof = {gs.node_dof[2 * a], gs.node_dof[2 * a + 1], gs.node_dof[2 * b],
                 gs.node_dof[2 * b + 1]};
      gs.bars.push_back(bar);
    }
  }
  gs.load_node = (g - 1) * g + (g - 1) / 2;
  gs.load = Vec::Zero(gs.dof);
  if (variant == TrussVariant::tru) {
    gs.load(gs.node_dof[2 * gs.load_node + 1]) = -1.0;
  } else {
    gs.load(gs.node_dof[2 * gs.load_node]) = 1.0;
  }
  return gs;
}

SparseSym bar_stiffness(const GroundStructure& gs, const Bar& bar, double young) {
  if (!(bar.length > 0.0)) throw std::invalid_argument("zero-length bar");
  const double f = young / (bar.length * bar.length);
  std::vector<SparseSym::Entry> e;
  for (int p = 0; p < 4; ++p) {
    for (int q = 0; q <= p; ++q) {
      const int r = bar.dof[p], c = bar.dof[q];
      if (r < 0 || c < 0) continue;
      const double v = f * bar.cosines[p] * bar.cosines[q];
      if (v != 0.0) e.push_back({r, c, v});
    }
  }
  return SparseSym(gs.dof, std::move(e));
}

SparseSym bar_mass(const GroundStructure& gs, const Bar& bar, double rho) {
  std::vector<SparseSym::Entry> e;
  for (int p = 0; p < 4; ++p) {
    if (bar.dof[p] >= 0) e.push_back({bar.dof[p], bar.dof[p], rho * bar.length / 2.0});
  }
  return SparseSym(gs.dof, std::move(e));
}

Mat stiffness_matrix(const GroundStructure& gs, const Vec& t, double young) {
  Mat k = Mat::Zero(gs.dof, gs.dof);
  for (int j = 0; j < gs.num_bars(); ++j) {
    if (t(j) != 0.0) bar_stiffness(gs, gs.bars[j], young).add_to(k, t(j));
  }
  return k;
}

namespace {

SparseSym nonstructural_mass(const GroundStructure& gs, double m0) {
  return SparseSym(gs.dof, {{gs.node_dof[2 * gs.load_node], gs.node_dof[2 * gs.load_node], m0},
                            {gs.node_dof[2 * gs.load_node + 1],
                             gs.node_dof[2 * gs.load_node + 1], m0}});
}

}  // namespace

Mat mass_matrix(const GroundStructure& gs, const Vec& t, const TrussSdpSpec& spec) {
  Mat m = Mat::Zero(gs.dof, gs.dof);
  for (int j = 0; j < gs.num_bars(); ++j) {
    if (t(j) != 0.0) bar_mass(gs, gs.bars[j], spec.rho).add_to(m, t(j));
  }
  nonstructural_mass(gs, spec.m0).add_to(m, 1.0);
  return m;
}

double pencil_min_eig(const GroundStructure& gs, const Vec& t, const TrussSdpSpec& spec) {
  const Mat k = stiffness_matrix(gs, t, spec.young);
  const Mat m = mass_matrix(gs, t, spec);
  Eigen::GeneralizedSelfAdjointEigenSolver<Mat> es(k, m, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw std::runtime_error("pencil eigensolver failed");
  return es.eigenvalues()(0);
}

double resolve_lambda_bar(const GroundStructure& gs, const TrussSdpSpec& spec) {
  if (spec.lambda_bar >= 0.0) return spec.lambda_bar;
  return 0.01 * pencil_min_eig(gs, Vec::Ones(gs.num_bars()), spec);
}

namespace {

// [[0, 0], [0, S]] embedded with a one-row offset.
SparseSym shifted(const SparseSym& s, int dim) {
  std::vector<SparseSym::Entry> e;
  e.reserve(s.nnz());
  for (const auto& x : s.entries()) e.push_back({x.row + 1, x.col + 1, x.value});
  return SparseSym(dim, std::move(e));
}

SparseSym combine(const SparseSym& a, double sa, const SparseSym& b, double sb) {
  Mat tmp = Mat::Zero(a.dim(), a.dim());
  a.add_to(tmp, sa);
  b.add_to(tmp, sb);
  std::vector<SparseSym::Entry> e;
  for (const auto& x : a.entries()) {
    if (tmp(x.row, x.col) != 0.0) e.push_back({x.row, x.col, tmp(x.row, x.col)});
    tmp(x.row, x.col) = 0.0;
  }
  for (const auto& x : b.entries()) {
    if (tmp(x.row, x.col) != 0.0) e.push_back({x.row, x.col, tmp(x.row, x.col)});
    tmp(x.row, x.col) = 0.0;
  }
  return SparseSym(a.dim(), std::move(e));
}

LmiBlock compliance_lmi(const GroundStructure& gs, const TrussSdpSpec& spec) {
  LmiBlock blk;
  blk.dim = gs.dof + 1;
  std::vector<SparseSym::Entry> c;
  c.push_back({0, 0, spec.gamma});
  for (int i = 0; i < gs.dof; ++i) {
    if (gs.load(i) != 0.0) c.push_back({i + 1, 0, -gs.load(i)});
  }
  blk.objective = SparseSym(blk.dim, std::move(c));
  for (const auto& bar : gs.bars) {
    blk.constraints.push_back(shifted(bar_stiffness(gs, bar, spec.young), blk.dim).scaled(-1.0));
  }
  return blk;
}

SdpProblem with_box(const GroundStructure& gs, const TrussSdpSpec& spec,
                    std::vector<LmiBlock> blocks) {
  if (!(spec.t_upper > spec.t_lower) || spec.t_lower < 0.0) {
    throw std::invalid_argument("truss bounds must satisfy 0 <= t_lower < t_upper");
  }
  const int n = gs.num_bars();
  std::vector<Eigen::Triplet<double>> trip;
  Vec d(2 * n);
  for (int j = 0; j < n; ++j) {
    trip.emplace_back(j, j, 1.0);
    trip.emplace_back(n + j, j, -1.0);
    d(j) = spec.t_upper;
    d(n + j) = -spec.t_lower;
  }
  SpMat dm(2 * n, n);
  dm.setFromTriplets(trip.begin(), trip.end());
  return SdpProblem(-Vec::Ones(n), std::move(blocks), std::move(dm), std::move(d));
}

}  // namespace

SdpProblem assemble_tru_sdp(const GroundStructure& gs, const TrussSdpSpec& spec) {
  if (!(spec.gamma > 0.0)) throw std::invalid_argument("compliance bound must be positive");
  std::vector<LmiBlock> blocks;
  blocks.push_back(compliance_lmi(gs, spec));
  return with_box(gs, spec, std::move(blocks));
}

SdpProblem assemble_vib_sdp(const GroundStructure& gs, const TrussSdpSpec& spec) {
  if (!(spec.gamma > 0.0)) throw std::invalid_argument("compliance bound must be positive");
  const double lam = resolve_lambda_bar(gs, spec);
  std::vector<LmiBlock> blocks;
  blocks.push_back(compliance_lmi(gs, spec));
  LmiBlock vib;
  vib.dim = gs.dof;
  vib.objective = nonstructural_mass(gs, spec.m0).scaled(-lam);
  for (const auto& bar : gs.bars) {
    vib.constraints.push_back(
        combine(bar_stiffness(gs, bar, spec.young), -1.0, bar_mass(gs, bar, spec.rho), lam));
  }
  blocks.push_back(std::move(vib));
  return with_box(gs, spec, std::move(blocks));
}

SdpProblem assemble_truss_sdp(const GroundStructure& gs, const TrussSdpSpec& spec) {
  return gs.variant == TrussVariant::tru ? assemble_tru_sdp(gs, spec) : assemble_vib_sdp(gs, spec);
}

Mat compliance_block(const GroundStructure& gs, const Vec& t, double gamma, double young) {
  Mat m = Mat::Zero(gs.dof + 1, gs.dof + 1);
  m(0, 0) = gamma;
  m.block(1, 0, gs.dof, 1) = -gs.load;
  m.block(0, 1, 1, gs.dof) = -gs.load.transpose();
  m.bottomRightCorner(gs.dof, gs.dof) = stiffness_matrix(gs, t, young);
  return m;
}

TrussVerification verify_solution(const GroundStructure& gs, const TrussSdpSpec& spec,
                                  const Vec& t, const Mat* dual_block) {
  TrussVerification v;
  v.gamma = spec.gamma;
  const Mat k = stiffness_matrix(gs, t, spec.young);
  Eigen::LDLT<Mat> ldlt(k);
  const double kmax = k.cwiseAbs().maxCoeff();
  const Vec dd = ldlt.vectorD();
  v.stiffness_singular = ldlt.info() != Eigen::Success || dd.minCoeff() <= 1e-14 * kmax;
  if (!v.stiffness_singular) {
    const Vec u = ldlt.solve(gs.load);
    v.compliance = gs.load.dot(u);
  } else {
    v.compliance = std::numeric_limits<double>::infinity();
  }
  if (gs.variant == TrussVariant::vib) {
    v.lambda_bar = resolve_lambda_bar(gs, spec);
    v.pencil_min = pencil_min_eig(gs, t, spec);
  }
  if (dual_block) {
    const Vec ev = sym_eigenvalues(*dual_block);
    v.dual_spectrum = ev.reverse();
    const auto m = ev.size();
    const double median = m % 2 ? ev(m / 2) : 0.5 * (ev(m / 2 - 1) + ev(m / 2));
    for (Eigen::Index i = 0; i < m; ++i) {
      if (ev(i) > 100.0 * std::max(median, 0.0) && ev(i) > 1e-8 * ev(m - 1)) ++v.outliers;
    }
    v.gap_ratio = m > 1 ? v.dual_spectrum(0) / std::abs(v.dual_spectrum(1))
                        : std::numeric_limits<double>::infinity();
  }
  return v;
}

std::string geometry_json(const GroundStructure& gs, const TrussSdpSpec& spec) {
  nlohmann::json j;
  j["family"] = to_string(gs.variant);
  j["grid"] = gs.g;
  j["nodes"] = gs.nodes;
  nlohmann::json bars = nlohmann::json::array();
  for (const auto& b : gs.bars) bars.push_back({b.a, b.b});
  j["bars"] = bars;
  std::vector<int> fixed;
  for (std::size_t i = 0; i < gs.node_dof.size(); ++i) {
    if (gs.node_dof[i] < 0) fixed.push_back(static_cast<int>(i));
  }
  j["fixed_dofs"] = fixed;
  j["load_node"] = gs.load_node;
  j["load"] = std::vector<double>(gs.load.data(), gs.load.data() + gs.load.size());
  j["gamma"] = spec.gamma;
  j["t_lower"] = spec.t_lower;
  j["t_upper"] = spec.t_upper;
  j["rho"] = spec.rho;
  j["m0"] = spec.m0;
  j["young"] = spec.young;
  if (gs.variant == TrussVariant::vib) j["lambda_bar"] = resolve_lambda_bar(gs, spec);
  return j.dump(1);
}

std::pair<GroundStructure, TrussSdpSpec> read_geometry_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  GroundStructure gs =
      gen_ground(j.at("grid").get<int>(), parse_truss_variant(j.at("family").get<std::string>()));
  TrussSdpSpec spec;
  spec.gamma = j.value("gamma", spec.gamma);
  spec.t_lower = j.value("t_lower", spec.t_lower);
  spec.t_upper = j.value("t_upper", spec.t_upper);
  spec.rho = j.value("rho", spec.rho);
  spec.m0 = j.value("m0", spec.m0);
  spec.young = j.value("young", spec.young);
  spec.lambda_bar = j.value("lambda_bar", spec.lambda_bar);
  return {std::move(gs), spec};
}

}  // namespace lorank
