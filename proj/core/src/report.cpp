#include "lorank/report.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace lorank {

std::vector<int> SolveReport::cg_per_iteration() const {
  std::vector<int> out;
  out.reserve(trace.size());
  for (const auto& r : trace) out.push_back(r.cg);
  return out;
}

std::vector<SpectrumSummary> summarize_spectra(const BlockSymMatrix& x) {
  std::vector<SpectrumSummary> out;
  for (const auto& blk : x.blocks) {
    const Vec ev = sym_eigenvalues(blk);
    SpectrumSummary s;
    const auto m = ev.size();
    for (Eigen::Index i = 0; i < std::min<Eigen::Index>(3, m); ++i) s.top.push_back(ev(m - 1 - i));
    s.median = m % 2 ? ev(m / 2) : 0.5 * (ev(m / 2 - 1) + ev(m / 2));
    out.push_back(std::move(s));
  }
  return out;
}

namespace {

// JSON has no inf/nan; emit null instead.
nlohmann::json num(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

double gap_ratio(const SolveReport& rep) {
  if (rep.spectra.empty() || rep.spectra[0].top.size() < 2) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  const double second = std::abs(rep.spectra[0].top[1]);
  return second > 0 ? rep.spectra[0].top[0] / second : std::numeric_limits<double>::infinity();
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

}  // namespace

std::string to_json(const SolveReport& rep, bool with_trace) {
  nlohmann::json j;
  j["schema"] = 1;
  j["solver"] = rep.solver;
  j["precond"] = rep.precond;
  j["instance"] = rep.instance;
  j["status"] = rep.status;
  j["converged"] = rep.converged;
  j["iterations"] = rep.iterations;
  j["cg_total"] = rep.cg_total;
  j["seconds"] = num(rep.seconds);
  j["objective_primal"] = num(rep.objective_primal);
  j["objective_dual"] = num(rep.objective_dual);
  auto& d = j["dimacs"];
  d = nlohmann::json::array();
  for (double e : rep.dimacs.err) d.push_back(num(e));
  j["dimacs_max"] = num(rep.dimacs.max());
  auto& sp = j["spectra"];
  sp = nlohmann::json::array();
  for (const auto& s : rep.spectra) {
    nlohmann::json b;
    b["top"] = nlohmann::json::array();
    for (double v : s.top) b["top"].push_back(num(v));
    b["median"] = num(s.median);
    sp.push_back(b);
  }
  if (with_trace) {
    auto& t = j["trace"];
    t = nlohmann::json::array();
    for (const auto& r : rep.trace) {
      t.push_back({{"iter", r.iter},
                   {"cg", r.cg},
                   {"cg_corrector", r.cg_corrector},
                   {"inner", r.inner},
                   {"alpha", num(r.alpha)},
                   {"beta", num(r.beta)},
                   {"mu", num(r.mu)},
                   {"pi_lmi", num(r.pi_lmi)},
                   {"pi_lin", num(r.pi_lin)},
                   {"dimacs", num(r.dimacs)},
                   {"precond", r.precond},
                   {"seconds", num(r.seconds)}});
    }
  }
  return j.dump(2);
}

std::string csv_header() {
  return "instance,solver,precond,iter,cg_iter,cpu,cpu_per_iter,objective,dimacs,gap_ratio,status";
}

std::string csv_row(const SolveReport& rep) {
  std::string status = rep.status;
  for (char& c : status) {
    if (c == ',' || c == '\n') c = ';';
  }
  const double per = rep.iterations > 0 ? rep.seconds / rep.iterations : 0.0;
  return rep.instance + "," + rep.solver + "," + rep.precond + "," +
         std::to_string(rep.iterations) + "," + std::to_string(rep.cg_total) + "," +
         fmt(rep.seconds) + "," + fmt(per) + "," + fmt(rep.objective_primal) + "," +
         fmt(rep.dimacs.max()) + "," + fmt(gap_ratio(rep)) + "," + status;
}

}  // namespace lorank
