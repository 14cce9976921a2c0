#include "lorank/sdpa_io.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <tuple>
#include <vector>

namespace lorank {

namespace {

struct Token {
  std::string text;
  int line;
};

// Header lines may carry trailing words ("2 =mdim"), so tokens are kept per line.
std::vector<std::vector<Token>> tokenize(std::istream& in) {
  std::vector<std::vector<Token>> lines;
  std::string raw;
  int lineno = 0;
  bool header_seen = false;
  while (std::getline(in, raw)) {
    ++lineno;
    const auto first = raw.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    if (!header_seen && (raw[first] == '"' || raw[first] == '*')) continue;
    header_seen = true;
    for (char& c : raw) {
      if (c == ',' || c == '{' || c == '}' || c == '(' || c == ')') c = ' ';
    }
    std::istringstream ss(raw);
    std::vector<Token> toks;
    std::string t;
    while (ss >> t) toks.push_back({t, lineno});
    if (!toks.empty()) lines.push_back(std::move(toks));
  }
  return lines;
}

bool parse_double(const std::string& s, double& v) {
  const char* p = s.c_str();
  char* end = nullptr;
  errno = 0;
  v = std::strtod(p, &end);
  return end != p && *end == '\0' && errno != ERANGE;
}

bool parse_int(const std::string& s, long& v) {
  double d;
  if (!parse_double(s, d)) return false;
  v = static_cast<long>(d);
  return static_cast<double>(v) == d;
}

// Leading numeric tokens of a line; stops at the first non-number.
std::vector<double> numeric_prefix(const std::vector<Token>& toks) {
  std::vector<double> out;
  for (const auto& t : toks) {
    double v;
    if (!parse_double(t.text, v)) break;
    out.push_back(v);
  }
  return out;
}

}  // namespace

SdpProblem read_sdpa(std::istream& in) {
  const auto lines = tokenize(in);
  std::size_t li = 0;
  auto need_line = [&](const char* what) -> const std::vector<Token>& {
    if (li >= lines.size()) {
      throw SdpaParseError(lines.empty() ? 0 : lines.back().back().line,
                           std::string("unexpected end of file, expected ") + what);
    }
    return lines[li++];
  };

  const auto& l_m = need_line("number of constraints");
  auto v_m = numeric_prefix(l_m);
  long n = 0;
  if (v_m.empty() || !parse_int(l_m[0].text, n) || n <= 0) {
    throw SdpaParseError(l_m[0].line, "invalid number of constraints");
  }
  const auto& l_b = need_line("number of blocks");
  long nblocks = 0;
  if (numeric_prefix(l_b).empty() || !parse_int(l_b[0].text, nblocks) || nblocks <= 0) {
    throw SdpaParseError(l_b[0].line, "invalid number of blocks");
  }

  std::vector<long> bstruct;
  int bline = 0;
  while (static_cast<long>(bstruct.size()) < nblocks) {
    const auto& l = need_line("block structure");
    bline = l[0].line;
    for (const auto& t : l) {
      long v;
      if (!parse_int(t.text, v)) break;
      if (v == 0) throw SdpaParseError(t.line, "block size 0");
      bstruct.push_back(v);
      if (static_cast<long>(bstruct.size()) == nblocks) break;
    }
    if (bstruct.empty()) throw SdpaParseError(bline, "invalid block structure");
  }

  std::vector<double> c;
  while (static_cast<long>(c.size()) < n) {
    const auto& l = need_line("objective vector");
    for (const auto& t : l) {
      double v;
      if (!parse_double(t.text, v)) break;
      c.push_back(v);
      if (static_cast<long>(c.size()) == n) break;
    }
  }

  // Map file blocks to LMI blocks or to offsets in the concatenated linear block.
  std::vector<int> lmi_index(nblocks, -1), lin_offset(nblocks, -1);
  std::vector<int> lmi_dims;
  int nu = 0;
  for (long k = 0; k < nblocks; ++k) {
    if (bstruct[k] > 0) {
      lmi_index[k] = static_cast<int>(lmi_dims.size());
      lmi_dims.push_back(static_cast<int>(bstruct[k]));
    } else {
      lin_offset[k] = nu;
      nu += static_cast<int>(-bstruct[k]);
    }
  }

  const int p = static_cast<int>(lmi_dims.size());
  // entries[blk][mat] -> list
  std::vector<std::vector<std::vector<SparseSym::Entry>>> ent(
      p, std::vector<std::vector<SparseSym::Entry>>(n + 1));
  std::vector<Eigen::Triplet<double>> dtrip;
  Vec d = Vec::Zero(nu);
  std::map<std::tuple<long, long, long, long>, int> seen;

  for (; li < lines.size(); ++li) {
    const auto& l = lines[li];
    const int ln = l[0].line;
    if (l.size() < 5) throw SdpaParseError(ln, "entry needs 5 fields");
    long mat, blk, i, j;
    double val;
    if (!parse_int(l[0].text, mat) || !parse_int(l[1].text, blk) || !parse_int(l[2].text, i) ||
        !parse_int(l[3].text, j) || !parse_double(l[4].text, val)) {
      throw SdpaParseError(ln, "malformed entry");
    }
    if (mat < 0 || mat > n) throw SdpaParseError(ln, "matrix index out of range");
    if (blk < 1 || blk > nblocks) throw SdpaParseError(ln, "block index out of range");
    const long dim = std::labs(bstruct[blk - 1]);
    if (i < 1 || j < 1 || i > dim || j > dim) throw SdpaParseError(ln, "entry index out of range");
    if (i > j) std::swap(i, j);
    const auto key = std::make_tuple(mat, blk, i, j);
    if (auto it = seen.find(key); it != seen.end()) {
      throw SdpaParseError(ln, "duplicate entry (first given on line " +
                                   std::to_string(it->second) + ")");
    }
    seen.emplace(key, ln);
    if (val == 0.0) continue;
    if (bstruct[blk - 1] < 0) {
      if (i != j) throw SdpaParseError(ln, "off-diagonal entry in diagonal block");
      const int row = lin_offset[blk - 1] + static_cast<int>(i) - 1;
      if (mat == 0) {
        d(row) = -val;
      } else {
        dtrip.emplace_back(row, static_cast<int>(mat) - 1, -val);
      }
    } else {
      ent[lmi_index[blk - 1]][mat].push_back(
          {static_cast<int>(j) - 1, static_cast<int>(i) - 1, -val});
    }
  }

  std::vector<LmiBlock> blocks(p);
  for (int k = 0; k < p; ++k) {
    blocks[k].dim = lmi_dims[k];
    blocks[k].objective = SparseSym(lmi_dims[k], std::move(ent[k][0]));
    blocks[k].constraints.reserve(n);
    for (long j = 1; j <= n; ++j) {
      blocks[k].constraints.emplace_back(lmi_dims[k], std::move(ent[k][j]));
    }
  }
  SpMat dmat(nu, n);
  dmat.setFromTriplets(dtrip.begin(), dtrip.end());
  Vec b(n);
  for (long j = 0; j < n; ++j) b(j) = -c[j];
  try {
    return SdpProblem(std::move(b), std::move(blocks), std::move(dmat), std::move(d));
  } catch (const std::invalid_argument& e) {
    throw SdpaParseError(bline, std::string("inconsistent block declaration: ") + e.what());
  }
}

SdpProblem load_sdpa(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  return read_sdpa(f);
}

namespace {

void put(std::ostream& out, long mat, int blk, int i, int j, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out << mat << ' ' << blk << ' ' << i << ' ' << j << ' ' << buf << '\n';
}

}  // namespace

void write_sdpa(std::ostream& out, const SdpProblem& prob) {
  const int n = prob.num_vars();
  const int p = prob.num_blocks();
  const bool has_lin = prob.num_lin() > 0;
  out << n << "\n" << (p + (has_lin ? 1 : 0)) << "\n";
  for (int k = 0; k < p; ++k) out << prob.block_dim(k) << (k + 1 < p || has_lin ? " " : "");
  if (has_lin) out << -prob.num_lin();
  out << "\n";
  char buf[64];
  for (int j = 0; j < n; ++j) {
    std::snprintf(buf, sizeof buf, "%.17g", -prob.b()(j));
    out << buf << (j + 1 < n ? " " : "\n");
  }

  // Column-major access to D for the per-matrix diagonal entries.
  Eigen::SparseMatrix<double, Eigen::ColMajor> dcol = prob.lin_matrix();
  for (long mat = 0; mat <= n; ++mat) {
    for (int k = 0; k < p; ++k) {
      const SparseSym& a =
          mat == 0 ? prob.block(k).objective : prob.block(k).constraints[mat - 1];
      for (const auto& e : a.entries()) put(out, mat, k + 1, e.col + 1, e.row + 1, -e.value);
    }
    if (!has_lin) continue;
    if (mat == 0) {
      for (int r = 0; r < prob.num_lin(); ++r) {
        if (prob.lin_rhs()(r) != 0.0) put(out, 0, p + 1, r + 1, r + 1, -prob.lin_rhs()(r));
      }
    } else {
      for (Eigen::SparseMatrix<double, Eigen::ColMajor>::InnerIterator it(dcol, mat - 1); it;
           ++it) {
        if (it.value() != 0.0) {
          const int r = static_cast<int>(it.row());
          put(out, mat, p + 1, r + 1, r + 1, -it.value());
        }
      }
    }
  }
}

void save_sdpa(const std::string& path, const SdpProblem& prob) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path);
  write_sdpa(f, prob);
  if (!f) throw std::runtime_error("write failed: " + path);
}

double sdpa_primal_objective(const SdpProblem& prob, const Vec& y) {
  return -dual_objective(prob, y);
}

double sdpa_dual_objective(const SdpProblem& prob, const BlockSymMatrix& x) {
  return -primal_objective(prob, x);
}

}  // namespace lorank
