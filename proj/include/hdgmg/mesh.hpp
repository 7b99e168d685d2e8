#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace hdg {

using Index = std::int32_t;
using Point = std::array<double, 3>;

inline constexpr Index kNoIndex = -1;

/// Simplicial mesh of a 2D or 3D domain together with every geometric
/// quantity the discretization needs.
///
/// Element vertex order is the order produced by construction/refinement
/// (Kuhn path order for structured meshes); local facet i of an element is
/// the facet opposite local vertex i. Facets are keyed by their sorted
/// vertex indices and numbered in lexicographic key order.
class MeshLevel {
 public:
  using Simplex = std::array<Index, 4>;
  using FacetKey = std::array<Index, 3>;

  MeshLevel() = default;

  /// Builds all connectivity and geometry. Throws std::invalid_argument on
  /// degenerate elements or non-manifold facets.
  static MeshLevel from_elements(int dim, std::vector<Point> vertices, std::vector<Simplex> elements);

  int dim() const { return dim_; }
  int nodes_per_element() const { return dim_ + 1; }
  int nodes_per_facet() const { return dim_; }

  Index num_vertices() const { return static_cast<Index>(vertices_.size()); }
  Index num_elements() const { return static_cast<Index>(elements_.size()); }
  Index num_facets() const { return static_cast<Index>(facets_.size()); }

  const Point& vertex(Index v) const { return vertices_[v]; }
  const Simplex& element(Index k) const { return elements_[k]; }
  const FacetKey& facet(Index f) const { return facets_[f]; }
  std::span<const Point> vertices() const { return vertices_; }

  /// Global facet index of local facet i (opposite local vertex i).
  Index elem_facet(Index k, int i) const { return elem_facets_[k][i]; }
  /// +1 when k is the first (lowest-index) element adjacent to the facet, -1 otherwise.
  int elem_facet_sign(Index k, int i) const { return elem_facet_sign_[k][i]; }

  /// Adjacent elements of a facet; second entry is kNoIndex on the boundary.
  const std::array<Index, 2>& facet_elems(Index f) const { return facet_elems_[f]; }
  /// Local facet index of f inside facet_elems(f)[side].
  int facet_local(Index f, int side) const { return facet_local_[f][side]; }
  bool is_boundary(Index f) const { return facet_elems_[f][1] == kNoIndex; }

  double elem_measure(Index k) const { return elem_measure_[k]; }
  double facet_measure(Index f) const { return facet_measure_[f]; }
  const Point& elem_barycenter(Index k) const { return elem_barycenter_[k]; }
  const Point& facet_barycenter(Index f) const { return facet_barycenter_[f]; }
  /// Unit outward normal of local facet i of element k.
  const Point& facet_normal(Index k, int i) const { return facet_normal_[k][i]; }
  /// |K|/|F| for local facet i of element k.
  double h_facet(Index k, int i) const { return h_facet_[k][i]; }
  /// Gradient of the barycentric coordinate of local vertex i.
  const Point& grad_lambda(Index k, int i) const { return grad_lambda_[k][i]; }

  /// Barycentric coordinate of local vertex i of element k at x.
  double barycentric(Index k, int i, const Point& x) const;

  /// Largest vertex-to-vertex distance over all elements.
  double max_element_diameter() const;
  double total_measure() const;

  /// Index of the facet with the given sorted key, or kNoIndex.
  Index find_facet(const FacetKey& key) const;

 private:
  int dim_ = 0;
  std::vector<Point> vertices_;
  std::vector<Simplex> elements_;
  std::vector<FacetKey> facets_;
  std::vector<std::array<Index, 4>> elem_facets_;
  std::vector<std::array<std::int8_t, 4>> elem_facet_sign_;
  std::vector<std::array<Index, 2>> facet_elems_;
  std::vector<std::array<std::int8_t, 2>> facet_local_;
  std::vector<double> elem_measure_;
  std::vector<double> facet_measure_;
  std::vector<Point> elem_barycenter_;
  std::vector<Point> facet_barycenter_;
  std::vector<std::array<Point, 4>> facet_normal_;
  std::vector<std::array<double, 4>> h_facet_;
  std::vector<std::array<Point, 4>> grad_lambda_;
};

/// Where a fine facet sits relative to the coarser mesh it was refined from.
struct FacetParent {
  enum class Kind : std::uint8_t { InteriorOfCoarseElement, OnCoarseFacet };
  Kind kind;
  Index id;  // coarse element or coarse facet index, depending on kind
};

struct RefinementMaps {
  std::vector<std::vector<Index>> child_elems;  // per coarse element
  std::vector<Index> elem_parent;               // per fine element
  std::vector<FacetParent> facet_parent;        // per fine facet
};

struct RefinedMesh {
  MeshLevel fine;
  RefinementMaps maps;
};

/// Red refinement: triangles into 4 via edge midpoints, tetrahedra into 8
/// with the Bey rule (interior diagonal between midpoints of edges 02 and 13).
RefinedMesh refine_uniform(const MeshLevel& coarse);

/// Nested sequence of uniformly refined meshes. Level 0 is the coarsest.
class MeshHierarchy {
 public:
  MeshHierarchy(MeshLevel coarse, int num_levels);

  int num_levels() const { return static_cast<int>(levels_.size()); }
  const MeshLevel& level(int l) const { return levels_[l]; }
  const MeshLevel& finest() const { return levels_.back(); }
  /// Maps from level l-1 to level l, for l >= 1.
  const RefinementMaps& maps(int l) const { return maps_[l - 1]; }

 private:
  std::vector<MeshLevel> levels_;
  std::vector<RefinementMaps> maps_;
};

/// Structured Kuhn triangulation of [0,1]^dim with n cells per axis.
MeshLevel build_unit_box_mesh_cells(int dim, int n);
/// Structured triangulation of [0,1]^dim with maximum element diameter <= target_h.
MeshLevel build_unit_box_mesh(int dim, double target_h);
/// Backward-facing step ([0.5,5]x[0,0.5]) U ([0,5]x[0.5,1]), extruded by [0,1] in 3D.
MeshLevel build_step_domain_mesh(int dim, double target_h);

/// Plain-text dump: `v x y [z]` per vertex, `e i j k [l]` per element.
void write_mesh_text(const MeshLevel& mesh, std::ostream& out);

// Small geometry helpers shared by the assembly code.
inline Point operator-(const Point& a, const Point& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline Point operator+(const Point& a, const Point& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
inline Point operator*(double s, const Point& a) { return {s * a[0], s * a[1], s * a[2]}; }
inline double dot(const Point& a, const Point& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

}  // namespace hdg
