#pragma once

#include "lorank/ip.hpp"
#include "lorank/model.hpp"
#include "lorank/pdal.hpp"
#include "lorank/truss.hpp"

#include <Eigen/LU>

#include <cstdint>
#include <random>

namespace lorank::test {

using Rng = std::mt19937_64;

/// Seed from LORANK_TEST_SEED, default 20240917.
std::uint64_t base_seed();
Rng make_rng(std::uint64_t salt = 0);

Vec random_vec(int n, Rng& rng);
Mat random_sym(int m, Rng& rng);
Mat random_orthogonal(int m, Rng& rng);
/// Q·diag(eigs)·Qᵀ with a random orthogonal Q.
Mat planted(const Vec& eigs, Rng& rng);
/// Random SPD with eigenvalues in [lo, hi].
Mat random_spd(int m, Rng& rng, double lo = 0.5, double hi = 2.0);
/// G·Gᵀ with G random m × k.
Mat random_rank_k(int m, int k, Rng& rng);

Mat kron(const Mat& a, const Mat& b);

double rel_diff(const Mat& a, const Mat& b);
double rel_diff(const Vec& a, const Vec& b);

/// min x s.t. x ≥ 1, as one 1×1 LMI block (optimum y = 1, X = 1).
SdpProblem toy_problem();

/// n variables, LMI blocks of the given orders with random sparse A_j, and
/// `lin` random linear rows; C chosen so y = 0 is strictly dual feasible.
SdpProblem random_problem(int n, const std::vector<int>& dims, int lin, Rng& rng);

/// Cached generated instances.
const SdpProblem& tru_instance(int g, bool e_variant = false);
const SdpProblem& vib_instance(int g, bool e_variant = false);

/// Random interior IP state: X, S random SPD per block, positive linear parts.
IpState random_ip_state(const SdpProblem& prob, Rng& rng);

/// Random PDAL state with y inside the penalty domain and random
/// positive definite multipliers.
PdalState random_pdal_state(const SdpProblem& prob, Rng& rng, const PdalConfig& cfg = {});

}  // namespace lorank::test
