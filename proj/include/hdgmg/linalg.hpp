#pragma once

#include <functional>
#include <span>
#include <vector>

#include "hdgmg/mesh.hpp"

namespace hdg {

struct Triplet {
  Index row;
  Index col;
  double value;
};

/// Compressed sparse row matrix with sorted, unique column indices per row.
class CsrMatrix {
 public:
  CsrMatrix() = default;
  CsrMatrix(Index rows, Index cols, std::vector<Index> row_ptr, std::vector<Index> col_idx, std::vector<double> values);

  Index rows() const { return rows_; }
  Index cols() const { return cols_; }
  std::size_t nnz() const { return values_.size(); }
  std::span<const Index> row_ptr() const { return row_ptr_; }
  std::span<const Index> col_idx() const { return col_idx_; }
  std::span<const double> values() const { return values_; }

  /// y = A x
  void multiply(std::span<const double> x, std::span<double> y) const;
  /// y = A^T x
  void multiply_transpose(std::span<const double> x, std::span<double> y) const;
  /// Entry (i, j), zero when not stored.
  double at(Index i, Index j) const;
  std::vector<double> diagonal() const;
  CsrMatrix transpose() const;
  double max_abs() const;
  /// max |A - A^T| <= tol * max |A|
  bool is_symmetric(double rel_tol = 1e-12) const;

 private:
  Index rows_ = 0;
  Index cols_ = 0;
  std::vector<Index> row_ptr_{0};
  std::vector<Index> col_idx_;
  std::vector<double> values_;
};

/// Duplicates are summed in (row, col, insertion) order, so the result is
/// bit-identical for identical input. Throws std::out_of_range on bad indices.
CsrMatrix assemble_from_triplets(Index rows, Index cols, std::vector<Triplet> triplets);

/// Sum of two matrices with the same shape: a + s*b.
CsrMatrix add(const CsrMatrix& a, const CsrMatrix& b, double s = 1.0);

/// Packed lower-triangular Cholesky factorization of a small dense SPD matrix.
class DenseCholesky {
 public:
  DenseCholesky() = default;
  /// `a` is n*n row-major; only the lower triangle is read. Throws
  /// std::runtime_error on a non-positive pivot.
  DenseCholesky(int n, std::span<const double> a);
  int size() const { return n_; }
  /// Solves in place.
  void solve(std::span<double> x) const;

 private:
  int n_ = 0;
  std::vector<double> l_;  // row i holds L(i, 0..i)
};

/// Dense copy of a sparse matrix, row-major; intended for coarse levels.
std::vector<double> to_dense(const CsrMatrix& a);

using LinearOperator = std::function<void(std::span<const double> in, std::span<double> out)>;

LinearOperator as_operator(const CsrMatrix& a);

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);
/// y += s * x
void axpy(double s, std::span<const double> x, std::span<double> y);

}  // namespace hdg
