#pragma once

#include "lorank/model.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace lorank {

enum class TrussVariant { tru, vib };

std::string to_string(TrussVariant v);
TrussVariant parse_truss_variant(const std::string& name);

struct Bar {
  int a = 0;
  int b = 0;
  double length = 0.0;
  /// Global free-DOF indices of (a_x, a_y, b_x, b_y); −1 where fixed.
  std::array<int, 4> dof{};
  /// Unit direction cosines over the same four DOFs.
  std::array<double, 4> cosines{};
};

/// g × g grid with unit spacing, left column fixed, every node pair a bar.
struct GroundStructure {
  int g = 0;
  TrussVariant variant = TrussVariant::tru;
  std::vector<std::array<double, 2>> nodes;
  /// Two entries per node: free-DOF index or −1.
  std::vector<int> node_dof;
  std::vector<Bar> bars;
  int dof = 0;
  int load_node = 0;
  Vec load;

  int num_bars() const { return static_cast<int>(bars.size()); }
};

struct TrussSdpSpec {
  double gamma = 1.0;
  double t_lower = 0.0;
  double t_upper = 1e4;
  double rho = 1.0;
  double m0 = 1.0;
  /// Vibration threshold; negative selects 0.01·λ_min of the pencil at t = 1.
  double lambda_bar = -1.0;
  double young = 1.0;
};

GroundStructure gen_ground(int g, TrussVariant variant);

/// K_i = (E/ℓ²)·γγᵀ on the free DOFs. Throws on a zero-length bar.
SparseSym bar_stiffness(const GroundStructure& gs, const Bar& bar, double young = 1.0);
/// Lumped mass ρℓ/2 on each free DOF of both ends.
SparseSym bar_mass(const GroundStructure& gs, const Bar& bar, double rho = 1.0);

Mat stiffness_matrix(const GroundStructure& gs, const Vec& t, double young = 1.0);
/// M(t) + M0
Mat mass_matrix(const GroundStructure& gs, const Vec& t, const TrussSdpSpec& spec);
/// Smallest eigenvalue of the pencil (K(t), M(t) + M0).
double pencil_min_eig(const GroundStructure& gs, const Vec& t, const TrussSdpSpec& spec);
double resolve_lambda_bar(const GroundStructure& gs, const TrussSdpSpec& spec);

/// One (dof+1) compliance block and the box constraints as the linear block.
SdpProblem assemble_tru_sdp(const GroundStructure& gs, const TrussSdpSpec& spec);
/// Adds the (dof) block K(t) − λ̄(M(t) + M0) ⪰ 0.
SdpProblem assemble_vib_sdp(const GroundStructure& gs, const TrussSdpSpec& spec);
SdpProblem assemble_truss_sdp(const GroundStructure& gs, const TrussSdpSpec& spec);

/// [[γ, −fᵀ], [−f, K(t)]]
Mat compliance_block(const GroundStructure& gs, const Vec& t, double gamma, double young = 1.0);

struct TrussVerification {
  bool stiffness_singular = false;
  double compliance = 0.0;
  double gamma = 0.0;
  std::optional<double> pencil_min;
  double lambda_bar = 0.0;
  /// Descending spectrum of the compliance-block multiplier, when given.
  Vec dual_spectrum;
  int outliers = 0;
  double gap_ratio = 0.0;
};

TrussVerification verify_solution(const GroundStructure& gs, const TrussSdpSpec& spec,
                                  const Vec& t, const Mat* dual_block = nullptr);

/// Geometry sidecar (nodes, bars, fixed DOFs, load, generator settings).
std::string geometry_json(const GroundStructure& gs, const TrussSdpSpec& spec);
/// Rebuilds the ground structure and settings from a sidecar.
std::pair<GroundStructure, TrussSdpSpec> read_geometry_json(const std::string& text);

}  // namespace lorank
