#pragma once

#include "lorank/model.hpp"

#include <iosfwd>
#include <stdexcept>
#include <string>

namespace lorank {

class SdpaParseError : public std::runtime_error {
 public:
  SdpaParseError(int line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

/// SDPA sparse (.dat-s) input. The SDPA primal "min cᵀx s.t. Σ F_j x_j − F0 ⪰ 0"
/// is read as the dual of SdpProblem with y = x, b = −c, C = −F0, A_j = −F_j.
/// Negative block sizes are diagonal blocks; all of them are concatenated into
/// the linear block (D, d).
SdpProblem read_sdpa(std::istream& in);
SdpProblem load_sdpa(const std::string& path);

/// Writes LMI blocks first, then one diagonal block, values with 17 digits.
void write_sdpa(std::ostream& out, const SdpProblem& prob);
void save_sdpa(const std::string& path, const SdpProblem& prob);

/// Objective values in the SDPA orientation: the SDPA primal value −bᵀy and
/// the SDPA dual value −(C•X + dᵀx_lin).
double sdpa_primal_objective(const SdpProblem& prob, const Vec& y);
double sdpa_dual_objective(const SdpProblem& prob, const BlockSymMatrix& x);

}  // namespace lorank
