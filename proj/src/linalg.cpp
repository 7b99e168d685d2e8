#include "hdgmg/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace hdg {

CsrMatrix::CsrMatrix(Index rows, Index cols, std::vector<Index> row_ptr, std::vector<Index> col_idx,
                     std::vector<double> values)
    : rows_(rows), cols_(cols), row_ptr_(std::move(row_ptr)), col_idx_(std::move(col_idx)), values_(std::move(values)) {
  if (row_ptr_.size() != static_cast<std::size_t>(rows) + 1 || col_idx_.size() != values_.size() ||
      static_cast<std::size_t>(row_ptr_.back()) != values_.size()) {
    throw std::invalid_argument("inconsistent CSR arrays");
  }
}

void CsrMatrix::multiply(std::span<const double> x, std::span<double> y) const {
  for (Index i = 0; i < rows_; ++i) {
    double s = 0.0;
    for (Index p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) s += values_[p] * x[col_idx_[p]];
    y[i] = s;
  }
}

void CsrMatrix::multiply_transpose(std::span<const double> x, std::span<double> y) const {
  std::fill(y.begin(), y.begin() + cols_, 0.0);
  for (Index i = 0; i < rows_; ++i) {
    for (Index p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) y[col_idx_[p]] += values_[p] * x[i];
  }
}

double CsrMatrix::at(Index i, Index j) const {
  const auto first = col_idx_.begin() + row_ptr_[i];
  const auto last = col_idx_.begin() + row_ptr_[i + 1];
  const auto it = std::lower_bound(first, last, j);
  if (it == last || *it != j) return 0.0;
  return values_[it - col_idx_.begin()];
}

std::vector<double> CsrMatrix::diagonal() const {
  std::vector<double> d(std::min(rows_, cols_), 0.0);
  for (Index i = 0; i < static_cast<Index>(d.size()); ++i) d[i] = at(i, i);
  return d;
}

CsrMatrix CsrMatrix::transpose() const {
  std::vector<Index> ptr(cols_ + 1, 0);
  for (Index c : col_idx_) ++ptr[c + 1];
  std::partial_sum(ptr.begin(), ptr.end(), ptr.begin());
  std::vector<Index> idx(values_.size());
  std::vector<double> val(values_.size());
  std::vector<Index> next(ptr.begin(), ptr.end() - 1);
  for (Index i = 0; i < rows_; ++i) {
    for (Index p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) {
      const Index q = next[col_idx_[p]]++;
      idx[q] = i;
      val[q] = values_[p];
    }
  }
  return CsrMatrix(cols_, rows_, std::move(ptr), std::move(idx), std::move(val));
}

double CsrMatrix::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

bool CsrMatrix::is_symmetric(double rel_tol) const {
  if (rows_ != cols_) return false;
  const double tol = rel_tol * max_abs();
  for (Index i = 0; i < rows_; ++i) {
    for (Index p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) {
      if (std::abs(values_[p] - at(col_idx_[p], i)) > tol) return false;
    }
  }
  // Entries present only in the transpose pattern are caught by the loop above
  // when visited from the other side.
  return true;
}

CsrMatrix assemble_from_triplets(Index rows, Index cols, std::vector<Triplet> triplets) {
  for (const Triplet& t : triplets) {
    if (t.row < 0 || t.row >= rows || t.col < 0 || t.col >= cols) {
      throw std::out_of_range("triplet index (" + std::to_string(t.row) + ", " + std::to_string(t.col) +
                              ") out of range");
    }
  }
  std::stable_sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  std::vector<Index> ptr(rows + 1, 0);
  std::vector<Index> idx;
  std::vector<double> val;
  idx.reserve(triplets.size());
  val.reserve(triplets.size());
  for (std::size_t p = 0; p < triplets.size();) {
    std::size_t q = p;
    double s = 0.0;
    while (q < triplets.size() && triplets[q].row == triplets[p].row && triplets[q].col == triplets[p].col) {
      s += triplets[q].value;
      ++q;
    }
    idx.push_back(triplets[p].col);
    val.push_back(s);
    ++ptr[triplets[p].row + 1];
    p = q;
  }
  std::partial_sum(ptr.begin(), ptr.end(), ptr.begin());
  return CsrMatrix(rows, cols, std::move(ptr), std::move(idx), std::move(val));
}

CsrMatrix add(const CsrMatrix& a, const CsrMatrix& b, double s) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw std::invalid_argument("shape mismatch in add");
  std::vector<Index> ptr(a.rows() + 1, 0);
  std::vector<Index> idx;
  std::vector<double> val;
  for (Index i = 0; i < a.rows(); ++i) {
    Index p = a.row_ptr()[i], pe = a.row_ptr()[i + 1];
    Index q = b.row_ptr()[i], qe = b.row_ptr()[i + 1];
    while (p < pe || q < qe) {
      const Index ca = p < pe ? a.col_idx()[p] : a.cols();
      const Index cb = q < qe ? b.col_idx()[q] : b.cols();
      if (ca == cb) {
        idx.push_back(ca);
        val.push_back(a.values()[p++] + s * b.values()[q++]);
      } else if (ca < cb) {
        idx.push_back(ca);
        val.push_back(a.values()[p++]);
      } else {
        idx.push_back(cb);
        val.push_back(s * b.values()[q++]);
      }
    }
    ptr[i + 1] = static_cast<Index>(idx.size());
  }
  return CsrMatrix(a.rows(), a.cols(), std::move(ptr), std::move(idx), std::move(val));
}

DenseCholesky::DenseCholesky(int n, std::span<const double> a) : n_(n), l_(static_cast<std::size_t>(n) * (n + 1) / 2) {
  auto L = [this](int i, int j) -> double& { return l_[static_cast<std::size_t>(i) * (i + 1) / 2 + j]; };
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      double s = a[static_cast<std::size_t>(i) * n + j];
      const double* li = &L(i, 0);
      const double* lj = &L(j, 0);
      for (int k = 0; k < j; ++k) s -= li[k] * lj[k];
      if (i == j) {
        if (!(s > 0.0)) throw std::runtime_error("Cholesky factorization: matrix is not positive definite");
        L(i, i) = std::sqrt(s);
      } else {
        L(i, j) = s / L(j, j);
      }
    }
  }
}

void DenseCholesky::solve(std::span<double> x) const {
  const int n = n_;
  for (int i = 0; i < n; ++i) {
    const double* li = &l_[static_cast<std::size_t>(i) * (i + 1) / 2];
    double s = x[i];
    for (int k = 0; k < i; ++k) s -= li[k] * x[k];
    x[i] = s / li[i];
  }
  for (int i = n - 1; i >= 0; --i) {
    x[i] /= l_[static_cast<std::size_t>(i) * (i + 1) / 2 + i];
    const double xi = x[i];
    const double* li = &l_[static_cast<std::size_t>(i) * (i + 1) / 2];
    for (int k = 0; k < i; ++k) x[k] -= li[k] * xi;
  }
}

std::vector<double> to_dense(const CsrMatrix& a) {
  std::vector<double> d(static_cast<std::size_t>(a.rows()) * a.cols(), 0.0);
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index p = a.row_ptr()[i]; p < a.row_ptr()[i + 1]; ++p) {
      d[static_cast<std::size_t>(i) * a.cols() + a.col_idx()[p]] = a.values()[p];
    }
  }
  return d;
}

LinearOperator as_operator(const CsrMatrix& a) {
  return [&a](std::span<const double> x, std::span<double> y) { a.multiply(x, y); };
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

void axpy(double s, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += s * x[i];
}

}  // namespace hdg
