#include "lorank/sparse_sym.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>
#include <utility>

namespace lorank {

SparseSym::SparseSym(int dim, std::vector<Entry> entries)
    : dim_(dim), entries_(std::move(entries)) {
  if (dim_ < 0) throw std::invalid_argument("SparseSym: negative dimension");
  for (auto& e : entries_) {
    if (e.row < e.col) std::swap(e.row, e.col);
    if (e.col < 0 || e.row >= dim_) {
      throw std::invalid_argument("SparseSym: index (" + std::to_string(e.row) +
                                  "," + std::to_string(e.col) +
                                  ") out of range for dim " +
                                  std::to_string(dim_));
    }
  }
  std::sort(entries_.begin(), entries_.end(), [](const Entry& a, const Entry& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  for (std::size_t k = 1; k < entries_.size(); ++k) {
    if (entries_[k].row == entries_[k - 1].row &&
        entries_[k].col == entries_[k - 1].col) {
      throw std::invalid_argument("SparseSym: duplicate coordinate (" +
                                  std::to_string(entries_[k].row) + "," +
                                  std::to_string(entries_[k].col) + ")");
    }
  }
}

void SparseSym::add_to(Mat& m, double scale) const {
  for (const auto& e : entries_) {
    const double v = scale * e.value;
    m(e.row, e.col) += v;
    if (e.row != e.col) m(e.col, e.row) += v;
  }
}

double SparseSym::dot(const Mat& m) const {
  double s = 0.0;
  for (const auto& e : entries_) {
    if (e.row == e.col) {
      s += e.value * m(e.row, e.col);
    } else {
      s += e.value * (m(e.row, e.col) + m(e.col, e.row));
    }
  }
  return s;
}

Vec SparseSym::apply(const Vec& x) const {
  Vec y = Vec::Zero(dim_);
  for (const auto& e : entries_) {
    y(e.row) += e.value * x(e.col);
    if (e.row != e.col) y(e.col) += e.value * x(e.row);
  }
  return y;
}

double SparseSym::frobenius_sq() const {
  double s = 0.0;
  for (const auto& e : entries_) {
    s += (e.row == e.col ? 1.0 : 2.0) * e.value * e.value;
  }
  return s;
}

Mat SparseSym::to_dense() const {
  Mat m = Mat::Zero(dim_, dim_);
  add_to(m, 1.0);
  return m;
}

SparseSym SparseSym::scaled(double s) const {
  SparseSym out = *this;
  for (auto& e : out.entries_) e.value *= s;
  return out;
}

void SparseSym::sandwich_row(const Mat& u, const Mat& gamma, double* out) const {
  const Eigen::Index k = u.cols();
  const Eigen::Index m = gamma.cols();
  std::fill(out, out + k * m, 0.0);
  for (const auto& e : entries_) {
    for (Eigen::Index a = 0; a < k; ++a) {
      const double ur = u(e.row, a);
      const double uc = u(e.col, a);
      double* dst = out + a * m;
      if (e.row == e.col) {
        if (ur == 0.0) continue;
        const double w = e.value * ur;
        for (Eigen::Index b = 0; b < m; ++b) dst[b] += w * gamma(e.col, b);
      } else {
        const double w1 = e.value * ur;
        const double w2 = e.value * uc;
        for (Eigen::Index b = 0; b < m; ++b) {
          dst[b] += w1 * gamma(e.col, b) + w2 * gamma(e.row, b);
        }
      }
    }
  }
}

}  // namespace lorank
