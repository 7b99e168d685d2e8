#pragma once

#include <span>
#include <vector>

#include "hdgmg/linalg.hpp"
#include "hdgmg/spaces.hpp"

namespace hdg {

/// Averaging prolongation from `coarse` to `fine` (fine free DOFs x coarse
/// free DOFs). Each fine facet value is the coarse CR function at the fine
/// facet barycenter, averaged over the two coarse elements when the fine facet
/// lies on an interior coarse facet. Works component-wise for vector spaces.
CsrMatrix build_prolongation(const FacetSpace& coarse, const FacetSpace& fine, const RefinementMaps& maps);

/// R = Dc^-1 P^T Df, the adjoint of P in the weighted facet inner products.
CsrMatrix weighted_restriction(const CsrMatrix& p, std::span<const double> coarse_weights,
                               std::span<const double> fine_weights);

/// Fine free DOFs on facets interior to each coarse element.
struct BubbleSpaceIndex {
  std::vector<std::vector<Index>> dofs;  // per coarse element, sorted
};

BubbleSpaceIndex build_bubble_index(const FacetSpace& fine, const RefinementMaps& maps, Index num_coarse_elements);

/// Prolongation followed by the local discrete harmonic correction
/// w -> w - E Abb^-1 (A w)_b on every coarse element's bubble DOFs.
class DivCorrectedProlongation {
 public:
  DivCorrectedProlongation() = default;
  DivCorrectedProlongation(CsrMatrix p_avg, const CsrMatrix& a_fine, BubbleSpaceIndex bubbles);

  Index fine_size() const { return p_.rows(); }
  Index coarse_size() const { return p_.cols(); }
  const CsrMatrix& averaging() const { return p_; }

  /// fine = I coarse
  void prolongate(std::span<const double> coarse, std::span<double> fine) const;
  /// coarse = I^T fine (Euclidean transpose)
  void restrict_transpose(std::span<const double> fine, std::span<double> coarse) const;

 private:
  CsrMatrix p_;
  const CsrMatrix* a_ = nullptr;
  BubbleSpaceIndex bubbles_;
  std::vector<DenseCholesky> factors_;
};

}  // namespace hdg
