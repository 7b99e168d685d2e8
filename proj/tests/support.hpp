// Shared helpers for the test suites: Eigen conversions, random meshes and
// brute-force Schur complements.
#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <random>
#include <vector>

#include "hdgmg/hdg_diffusion.hpp"
#include "hdgmg/linalg.hpp"
#include "hdgmg/mesh.hpp"

namespace hdg::test {

inline Eigen::SparseMatrix<double> to_eigen_sparse(const CsrMatrix& a) {
  std::vector<Eigen::Triplet<double>> t;
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index p = a.row_ptr()[i]; p < a.row_ptr()[i + 1]; ++p) t.emplace_back(i, a.col_idx()[p], a.values()[p]);
  }
  Eigen::SparseMatrix<double> m(a.rows(), a.cols());
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

inline Eigen::MatrixXd to_eigen_dense(const CsrMatrix& a) { return Eigen::MatrixXd(to_eigen_sparse(a)); }

inline Eigen::VectorXd to_eigen(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

inline std::vector<double> from_eigen(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

/// Structured unit-box mesh with interior vertices moved randomly by up to
/// `amount` times the cell size, so that no two elements are congruent.
inline MeshLevel perturbed_box_mesh(int dim, int n, double amount, unsigned seed) {
  const MeshLevel base = build_unit_box_mesh_cells(dim, n);
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-amount / n, amount / n);
  std::vector<Point> verts(base.vertices().begin(), base.vertices().end());
  for (Point& p : verts) {
    bool interior = true;
    for (int c = 0; c < dim; ++c) interior = interior && p[c] > 1e-12 && p[c] < 1.0 - 1e-12;
    if (!interior) continue;
    for (int c = 0; c < dim; ++c) p[c] += u(rng);
  }
  std::vector<MeshLevel::Simplex> elems;
  for (Index k = 0; k < base.num_elements(); ++k) elems.push_back(base.element(k));
  return MeshLevel::from_elements(dim, std::move(verts), std::move(elems));
}

/// Random non-degenerate simplex with vertices in [-1, 1]^dim.
inline std::vector<Point> random_simplex(int dim, std::mt19937& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (;;) {
    std::vector<Point> v(dim + 1, Point{0.0, 0.0, 0.0});
    for (auto& p : v) {
      for (int c = 0; c < dim; ++c) p[c] = u(rng);
    }
    Eigen::MatrixXd m(dim, dim);
    for (int i = 0; i < dim; ++i) {
      for (int c = 0; c < dim; ++c) m(c, i) = v[i + 1][c] - v[0][c];
    }
    if (std::abs(m.determinant()) > 0.05) return v;
  }
}

inline MeshLevel single_simplex_mesh(const std::vector<Point>& v) {
  const int dim = static_cast<int>(v.size()) - 1;
  MeshLevel::Simplex s{0, 1, 2, dim == 3 ? 3 : kNoIndex};
  return MeshLevel::from_elements(dim, v, {s});
}

struct SchurResult {
  Eigen::MatrixXd matrix;
  Eigen::VectorXd rhs;
};

/// Eliminates the first `n_local` unknowns of a square system by sparse LU.
inline SchurResult schur_complement(const CsrMatrix& full, const std::vector<double>& rhs, Index n_local) {
  const Eigen::SparseMatrix<double> m = to_eigen_sparse(full);
  const Index n = full.rows();
  const Index n_keep = n - n_local;
  const Eigen::SparseMatrix<double> all = m.topLeftCorner(n_local, n_local);
  const Eigen::SparseMatrix<double> alk = m.topRightCorner(n_local, n_keep);
  const Eigen::SparseMatrix<double> akl = m.bottomLeftCorner(n_keep, n_local);
  const Eigen::MatrixXd akk = Eigen::MatrixXd(m.bottomRightCorner(n_keep, n_keep));
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(all);
  const Eigen::VectorXd f = to_eigen(rhs);
  const Eigen::MatrixXd x = lu.solve(Eigen::MatrixXd(alk));
  const Eigen::VectorXd y = lu.solve(Eigen::VectorXd(f.head(n_local)));
  SchurResult out;
  out.matrix = akk - akl * x;
  out.rhs = f.tail(n_keep) - akl * y;
  return out;
}

inline double rel_frobenius(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return (a - b).norm() / std::max(b.norm(), 1e-300);
}

inline double rel_diff(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return (a - b).norm() / std::max(b.norm(), 1e-300);
}

}  // namespace hdg::test
