#pragma once

#include "lorank/linalg.hpp"

#include <vector>

namespace lorank {

/// Sparse symmetric matrix stored as its lower triangle in coordinate form.
///
/// Entries are kept sorted by (row, col) with row >= col; coordinates given
/// in the upper triangle are mirrored on construction. Duplicate coordinates
/// are rejected with std::invalid_argument.
class SparseSym {
 public:
  struct Entry {
    int row;
    int col;
    double value;

    friend bool operator==(const Entry&, const Entry&) = default;
  };

  SparseSym() = default;
  explicit SparseSym(int dim) : dim_(dim) {}
  SparseSym(int dim, std::vector<Entry> entries);

  int dim() const { return dim_; }
  const std::vector<Entry>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }
  std::size_t nnz() const { return entries_.size(); }

  /// m += scale · A
  void add_to(Mat& m, double scale) const;
  /// A • m for a symmetric m.
  double dot(const Mat& m) const;
  /// A · x
  Vec apply(const Vec& x) const;
  /// ‖A‖_F²
  double frobenius_sq() const;
  Mat to_dense() const;
  SparseSym scaled(double s) const;

  /// Row of the low-rank factor 𝐀ᵀ(U ⊗ Γ): entry (a, b) = u_aᵀ A γ_b, laid out
  /// as index a * Γ.cols() + b.
  void sandwich_row(const Mat& u, const Mat& gamma, double* out) const;

  friend bool operator==(const SparseSym&, const SparseSym&) = default;

 private:
  int dim_ = 0;
  std::vector<Entry> entries_;
};

}  // namespace lorank
