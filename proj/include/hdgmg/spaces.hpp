#pragma once

#include <functional>
#include <span>
#include <vector>

#include "hdgmg/mesh.hpp"

namespace hdg {

/// Piecewise constants on the mesh skeleton, scalar or vector valued, with
/// Dirichlet facets eliminated. The same numbering indexes Crouzeix-Raviart
/// functions: the CR value at m_F is the facet DOF.
class FacetSpace {
 public:
  using FacetPredicate = std::function<bool(Index facet)>;

  /// `dirichlet` is queried for boundary facets only. Free DOFs are numbered
  /// in facet order, components innermost.
  FacetSpace(const MeshLevel& mesh, int components, const FacetPredicate& dirichlet);

  const MeshLevel& mesh() const { return *mesh_; }
  int components() const { return components_; }
  Index n_free() const { return static_cast<Index>(dof_facet_.size()) * components_; }

  bool is_dirichlet(Index f) const { return first_dof_[f] == kNoIndex; }
  /// Free DOF of component c on facet f, or kNoIndex on a Dirichlet facet.
  Index dof(Index f, int c = 0) const { return first_dof_[f] == kNoIndex ? kNoIndex : first_dof_[f] + c; }
  Index facet_of(Index dof) const { return dof_facet_[dof / components_]; }
  int component_of(Index dof) const { return dof % components_; }

  /// Diagonal of the discrete inner product: sum over adjacent K of |K|/(d+1).
  std::span<const double> weights() const { return weights_; }
  double inner(std::span<const double> a, std::span<const double> b) const;

  /// Expands free values into per-facet values (component-major per facet),
  /// filling Dirichlet facets from `boundary` (size num_facets*components) or zero.
  std::vector<double> expand(std::span<const double> free_values, std::span<const double> boundary = {}) const;

 private:
  const MeshLevel* mesh_;
  int components_;
  std::vector<Index> first_dof_;
  std::vector<Index> dof_facet_;
  std::vector<double> weights_;
};

FacetSpace::FacetPredicate all_boundary_dirichlet();

/// Element-wise constants with the |K|-weighted pairing.
class PressureSpace {
 public:
  explicit PressureSpace(const MeshLevel& mesh);
  Index size() const { return static_cast<Index>(measures_.size()); }
  std::span<const double> weights() const { return measures_; }
  /// Subtracts the |K|-weighted mean.
  void project_mean_zero(std::span<double> p) const;
  double mean(std::span<const double> p) const;

 private:
  std::vector<double> measures_;
};

/// Gradient of the CR basis function of local facet i: |F_i| n_i / |K|.
Point cr_basis_gradient(const MeshLevel& mesh, Index k, int i);
/// Value of the CR basis function of local facet i at x.
double cr_basis_value(const MeshLevel& mesh, Index k, int i, const Point& x);
/// Gradient of the P1 function with the given values at the facet barycenters.
Point cr_gradient(const MeshLevel& mesh, Index k, std::span<const double> values);
/// Divergence of the vector P1 function; values[i*d + c] is component c at local facet i.
double cr_divergence(const MeshLevel& mesh, Index k, std::span<const double> values);

}  // namespace hdg
