#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "hdgmg/linalg.hpp"
#include "hdgmg/spaces.hpp"

namespace hdg {

enum class SmootherKind { PointJacobi, PointGaussSeidel, BlockJacobi, BlockGaussSeidel };

SmootherKind parse_smoother(std::string_view name);
std::string_view to_string(SmootherKind k);
bool is_block(SmootherKind k);

/// Per mesh vertex, the sorted free DOFs (all components) of facets containing it.
struct VertexPatchIndex {
  std::vector<std::vector<Index>> patches;
};

VertexPatchIndex build_vertex_patches(const FacetSpace& space);

/// Smoother S for a fixed SPD matrix. `smooth` performs x <- x + S (b - A x);
/// the transposed variant uses S^T (reverse sweep order for Gauss-Seidel).
class Smoother {
 public:
  Smoother() = default;
  static Smoother point_jacobi(const CsrMatrix& a, double damping = 0.5);
  static Smoother point_gauss_seidel(const CsrMatrix& a);
  static Smoother block_jacobi(const CsrMatrix& a, VertexPatchIndex patches, double damping = 0.4);
  static Smoother block_gauss_seidel(const CsrMatrix& a, VertexPatchIndex patches);
  static Smoother make(SmootherKind kind, const CsrMatrix& a, const FacetSpace& space, double damping);

  SmootherKind kind() const { return kind_; }
  double damping() const { return damping_; }
  const VertexPatchIndex& patches() const { return patches_; }

  void smooth(std::span<const double> b, std::span<double> x, bool transpose = false) const;
  /// out = S r (or S^T r).
  void apply(std::span<const double> r, std::span<double> out, bool transpose = false) const;

 private:
  void patch_solve(std::size_t v, std::span<double> local) const;
  void block_gs_step(std::size_t v, std::span<const double> b, std::span<double> x, std::vector<double>& local) const;

  SmootherKind kind_ = SmootherKind::PointJacobi;
  const CsrMatrix* a_ = nullptr;
  double damping_ = 1.0;
  std::vector<double> inv_diag_;
  std::vector<Index> diag_pos_;
  VertexPatchIndex patches_;
  std::vector<DenseCholesky> factors_;
};

/// Dense extraction of a principal submatrix, row-major.
std::vector<double> extract_block(const CsrMatrix& a, std::span<const Index> idx);

}  // namespace hdg
