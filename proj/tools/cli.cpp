#include "cli.hpp"

#include "lorank/diagnostics.hpp"
#include "lorank/sdpa_io.hpp"

#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <regex>
#include <sstream>
#include <stdexcept>
#include <tuple>

namespace lorank::cli {

namespace fs = std::filesystem;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

RankHints parse_rank(const std::string& s) {
  RankHints h;
  if (s.empty()) return h;
  if (s == "auto") {
    h.auto_detect = true;
    return h;
  }
  std::size_t pos = 0;
  int k = 0;
  try {
    k = std::stoi(s, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != s.size() || k < 0) throw std::invalid_argument("--rank expects a count or 'auto'");
  h.k = {k};
  return h;
}

double json_num(double v) { return std::isfinite(v) ? v : std::numeric_limits<double>::quiet_NaN(); }

}  // namespace

std::optional<std::pair<TrussVariant, int>> parse_generator_name(const std::string& name,
                                                                 bool* e_variant) {
  static const std::regex re("^(tru|vib)([0-9]+)(e?)$");
  std::smatch m;
  if (!std::regex_match(name, m, re)) return std::nullopt;
  if (e_variant) *e_variant = m[3].length() > 0;
  return std::make_pair(parse_truss_variant(m[1]), std::stoi(m[2]));
}

std::string instance_name(TrussVariant v, int g, bool e_variant) {
  return to_string(v) + std::to_string(g) + (e_variant ? "e" : "");
}

Instance generate_instance(TrussVariant v, int g, double t_lower) {
  Instance inst;
  inst.name = instance_name(v, g, t_lower > 0.0);
  inst.geometry = gen_ground(g, v);
  inst.spec.t_lower = t_lower;
  inst.prob = assemble_truss_sdp(*inst.geometry, inst.spec);
  return inst;
}

Instance resolve_instance(const std::string& arg) {
  bool e = false;
  if (auto gen = parse_generator_name(arg, &e)) {
    return generate_instance(gen->first, gen->second, e ? 1e-4 : 0.0);
  }
  if (!fs::exists(arg)) {
    throw std::runtime_error("'" + arg + "' is neither a generator name nor an existing file");
  }
  Instance inst;
  const fs::path p(arg);
  inst.name = p.stem().string();
  inst.prob = load_sdpa(arg);
  const fs::path side = p.parent_path() / (p.stem().string() + ".geom.json");
  if (fs::exists(side)) {
    auto [gs, spec] = read_geometry_json(read_file(side.string()));
    inst.geometry = std::move(gs);
    inst.spec = spec;
  }
  return inst;
}

std::vector<std::string> write_instance(const Instance& inst, const std::string& dir) {
  fs::create_directories(dir);
  const std::string dat = (fs::path(dir) / (inst.name + ".dat-s")).string();
  save_sdpa(dat, inst.prob);
  std::vector<std::string> out{dat};
  if (inst.geometry) {
    const std::string geo = (fs::path(dir) / (inst.name + ".geom.json")).string();
    write_file(geo, geometry_json(*inst.geometry, inst.spec));
    out.push_back(geo);
  }
  return out;
}

IpConfig make_ip_config(const RunConfig& rc) {
  IpConfig c;
  c.eps_dimacs = rc.tol;
  c.cg_maxiter = rc.cg_maxiter;
  if (rc.maxiter > 0) c.maxiter = rc.maxiter;
  if (!rc.precond.empty()) c.precond = parse_precond_kind(rc.precond);
  if (!usable_by_ip(c.precond)) {
    throw std::invalid_argument("preconditioner '" + to_string(c.precond) +
                                "' needs the pdal solver");
  }
  c.rank = parse_rank(rc.rank);
  c.verbose = rc.verbose;
  return c;
}

PdalConfig make_pdal_config(const RunConfig& rc, const Instance& inst) {
  const bool vib = inst.geometry ? inst.geometry->variant == TrussVariant::vib
                                 : inst.prob.num_blocks() > 1;
  PdalConfig c = vib ? PdalConfig::vib() : PdalConfig::tru();
  if (!rc.config_path.empty()) c = pdal_config_from_json(read_file(rc.config_path), c);
  c.eps_dimacs = rc.tol;
  c.cg_maxiter = rc.cg_maxiter;
  if (rc.maxiter > 0) c.maxiter = rc.maxiter;
  if (!rc.precond.empty()) c.precond = parse_precond_kind(rc.precond);
  if (!usable_by_pdal(c.precond)) {
    throw std::invalid_argument("preconditioner '" + to_string(c.precond) +
                                "' needs the ip solver");
  }
  c.rank = parse_rank(rc.rank);
  c.verbose = rc.verbose;
  validate(c);
  return c;
}

RunResult run_solve(const Instance& inst, const RunConfig& rc) {
  if (rc.diag && inst.prob.num_vars() > kDiagnosticMaxVars) {
    throw std::invalid_argument("--diag needs n <= " + std::to_string(kDiagnosticMaxVars));
  }
  RunResult res;
  nlohmann::json diag = nlohmann::json::array();
  if (rc.solver == "ip") {
    IpConfig c = make_ip_config(rc);
    if (rc.diag) {
      c.observer = [&diag, &c](const IpIterationView& v) {
        const auto splits = ip_splits(v.state, c.rank, c.tau_rule);
        const ConditionBound cb = alpha_condition_bound(v.prob, v.state, splits);
        diag.push_back({{"iter", v.state.iter},
                        {"kappa", json_num(cb.kappa)},
                        {"bound", json_num(cb.bound)},
                        {"holds", cb.holds()}});
      };
    }
    std::tie(res.point, res.report) = ip_solve(inst.prob, c);
  } else if (rc.solver == "pdal") {
    PdalConfig c = make_pdal_config(rc, inst);
    if (rc.diag) {
      int step = 0;
      c.observer = [&diag, &step](const PdalIterationView& v) {
        const HessianFloor f =
            hessian_floor(dense_pdal_hessian(v.prob, v.state, v.eval), v.state.r);
        diag.push_back({{"step", ++step},
                        {"hessian_min_eig", json_num(f.lambda_min)},
                        {"r", v.state.r},
                        {"slack", json_num(f.slack)},
                        {"holds", f.holds()}});
      };
    }
    std::tie(res.point, res.report) = pdal_solve(inst.prob, c);
  } else {
    throw std::invalid_argument("--solver must be ip or pdal");
  }
  res.report.instance = inst.name;
  if (rc.diag) res.diagnostics = diag.dump();
  return res;
}

std::string result_json(const RunResult& res, const RunConfig& rc) {
  nlohmann::json j = nlohmann::json::parse(to_json(res.report));
  j["settings"] = {{"tol", rc.tol},
                   {"cg_maxiter", rc.cg_maxiter},
                   {"maxiter", rc.maxiter},
                   {"rank", rc.rank.empty() ? "default" : rc.rank},
                   {"seed", rc.seed}};
  if (!res.diagnostics.empty()) j["diagnostics"] = nlohmann::json::parse(res.diagnostics);
  return j.dump(2);
}

int exit_code(const SolveReport& rep, double tol) {
  return rep.dimacs.max() <= tol ? kOk : kNotConverged;
}

std::string bench_csv(const std::vector<std::string>& instances,
                      const std::vector<std::string>& solvers,
                      const std::vector<std::string>& preconds, const RunConfig& base) {
  std::string out = csv_header() + "\n";
  for (const auto& name : instances) {
    std::optional<Instance> inst;
    std::string load_error;
    try {
      inst = resolve_instance(name);
    } catch (const std::exception& e) {
      load_error = e.what();
    }
    for (const auto& solver : solvers) {
      const std::vector<std::string> pcs =
          preconds.empty() ? std::vector<std::string>{""} : preconds;
      for (const auto& pc : pcs) {
        RunConfig rc = base;
        rc.solver = solver;
        rc.precond = pc;
        SolveReport rep;
        rep.instance = name;
        rep.solver = solver;
        rep.precond = pc.empty() ? "default" : pc;
        if (!inst) {
          rep.status = "error: " + load_error;
          out += csv_row(rep) + "\n";
          continue;
        }
        try {
          rep = run_solve(*inst, rc).report;
        } catch (const std::exception& e) {
          rep.status = std::string("error: ") + e.what();
        }
        out += csv_row(rep) + "\n";
      }
    }
  }
  return out;
}

std::string verification_json(const Instance& inst, const RunResult& res) {
  if (!inst.geometry) throw std::invalid_argument("verification needs a truss geometry");
  const TrussVerification v =
      verify_solution(*inst.geometry, inst.spec, res.point.y, &res.point.x.blocks[0]);
  nlohmann::json j;
  j["instance"] = inst.name;
  j["stiffness_singular"] = v.stiffness_singular;
  j["compliance"] = json_num(v.compliance);
  j["gamma"] = v.gamma;
  j["pencil_min"] = v.pencil_min ? nlohmann::json(json_num(*v.pencil_min)) : nlohmann::json();
  j["lambda_bar"] = v.lambda_bar;
  j["outliers"] = v.outliers;
  j["gap_ratio"] = json_num(v.gap_ratio);
  nlohmann::json top = nlohmann::json::array();
  for (Eigen::Index i = 0; i < std::min<Eigen::Index>(5, v.dual_spectrum.size()); ++i) {
    top.push_back(json_num(v.dual_spectrum(i)));
  }
  j["dual_spectrum_top"] = top;
  j["volume"] = json_num(res.point.y.sum());
  return j.dump(2);
}

}  // namespace lorank::cli
