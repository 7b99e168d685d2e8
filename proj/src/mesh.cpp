#include "hdgmg/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>

namespace hdg {

namespace {

double norm(const Point& a) { return std::sqrt(dot(a, a)); }

Point cross(const Point& a, const Point& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

MeshLevel::FacetKey facet_key(const MeshLevel::Simplex& s, int dim, int opposite) {
  MeshLevel::FacetKey key{kNoIndex, kNoIndex, kNoIndex};
  int n = 0;
  for (int j = 0; j <= dim; ++j) {
    if (j != opposite) key[n++] = s[j];
  }
  std::sort(key.begin(), key.begin() + dim);
  return key;
}

}  // namespace

MeshLevel MeshLevel::from_elements(int dim, std::vector<Point> vertices, std::vector<Simplex> elements) {
  if (dim != 2 && dim != 3) throw std::invalid_argument("mesh dimension must be 2 or 3");
  MeshLevel m;
  m.dim_ = dim;
  m.vertices_ = std::move(vertices);
  m.elements_ = std::move(elements);
  const int nloc = dim + 1;
  const Index ne = m.num_elements();

  for (auto& s : m.elements_) {
    if (dim == 2) s[3] = kNoIndex;
    for (int j = 0; j < nloc; ++j) {
      if (s[j] < 0 || s[j] >= m.num_vertices()) throw std::invalid_argument("element vertex out of range");
    }
  }

  // Element geometry from the inverse Jacobian.
  m.elem_measure_.resize(ne);
  m.elem_barycenter_.resize(ne);
  m.grad_lambda_.resize(ne);
  const double factorial = dim == 2 ? 2.0 : 6.0;
  for (Index k = 0; k < ne; ++k) {
    const auto& s = m.elements_[k];
    const Point& x0 = m.vertices_[s[0]];
    std::array<Point, 4> grads{};
    double det = 0.0;
    if (dim == 2) {
      const Point a = m.vertices_[s[1]] - x0;
      const Point b = m.vertices_[s[2]] - x0;
      det = a[0] * b[1] - a[1] * b[0];
      if (std::abs(det) < 1e-300) throw std::invalid_argument("degenerate triangle");
      // Rows of inv([a b]).
      grads[1] = {b[1] / det, -b[0] / det, 0.0};
      grads[2] = {-a[1] / det, a[0] / det, 0.0};
    } else {
      const Point a = m.vertices_[s[1]] - x0;
      const Point b = m.vertices_[s[2]] - x0;
      const Point c = m.vertices_[s[3]] - x0;
      const Point bxc = cross(b, c);
      det = dot(a, bxc);
      if (std::abs(det) < 1e-300) throw std::invalid_argument("degenerate tetrahedron");
      grads[1] = (1.0 / det) * bxc;
      grads[2] = (1.0 / det) * cross(c, a);
      grads[3] = (1.0 / det) * cross(a, b);
    }
    grads[0] = {0.0, 0.0, 0.0};
    for (int j = 1; j < nloc; ++j) grads[0] = grads[0] - grads[j];
    m.grad_lambda_[k] = grads;
    m.elem_measure_[k] = std::abs(det) / factorial;

    Point bc{0.0, 0.0, 0.0};
    for (int j = 0; j < nloc; ++j) bc = bc + m.vertices_[s[j]];
    m.elem_barycenter_[k] = (1.0 / nloc) * bc;
  }

  // Facet enumeration: sort (key, element, local) and deduplicate.
  struct Incidence {
    FacetKey key;
    Index elem;
    int local;
  };
  std::vector<Incidence> inc;
  inc.reserve(static_cast<std::size_t>(ne) * nloc);
  for (Index k = 0; k < ne; ++k) {
    for (int i = 0; i < nloc; ++i) inc.push_back({facet_key(m.elements_[k], dim, i), k, i});
  }
  std::sort(inc.begin(), inc.end(), [](const Incidence& a, const Incidence& b) {
    if (a.key != b.key) return a.key < b.key;
    return a.elem < b.elem;
  });

  m.elem_facets_.assign(ne, {kNoIndex, kNoIndex, kNoIndex, kNoIndex});
  m.elem_facet_sign_.assign(ne, {0, 0, 0, 0});
  for (std::size_t p = 0; p < inc.size();) {
    std::size_t q = p + 1;
    while (q < inc.size() && inc[q].key == inc[p].key) ++q;
    if (q - p > 2) throw std::invalid_argument("facet shared by more than two elements");
    const Index f = static_cast<Index>(m.facets_.size());
    m.facets_.push_back(inc[p].key);
    std::array<Index, 2> adj{inc[p].elem, kNoIndex};
    std::array<std::int8_t, 2> loc{static_cast<std::int8_t>(inc[p].local), -1};
    m.elem_facets_[inc[p].elem][inc[p].local] = f;
    m.elem_facet_sign_[inc[p].elem][inc[p].local] = 1;
    if (q - p == 2) {
      adj[1] = inc[p + 1].elem;
      loc[1] = static_cast<std::int8_t>(inc[p + 1].local);
      m.elem_facets_[inc[p + 1].elem][inc[p + 1].local] = f;
      m.elem_facet_sign_[inc[p + 1].elem][inc[p + 1].local] = -1;
    }
    m.facet_elems_.push_back(adj);
    m.facet_local_.push_back(loc);
    p = q;
  }

  const Index nf = m.num_facets();
  m.facet_measure_.resize(nf);
  m.facet_barycenter_.resize(nf);
  for (Index f = 0; f < nf; ++f) {
    const auto& key = m.facets_[f];
    Point bc{0.0, 0.0, 0.0};
    for (int j = 0; j < dim; ++j) bc = bc + m.vertices_[key[j]];
    m.facet_barycenter_[f] = (1.0 / dim) * bc;
    if (dim == 2) {
      m.facet_measure_[f] = norm(m.vertices_[key[1]] - m.vertices_[key[0]]);
    } else {
      m.facet_measure_[f] =
          0.5 * norm(cross(m.vertices_[key[1]] - m.vertices_[key[0]], m.vertices_[key[2]] - m.vertices_[key[0]]));
    }
  }

  m.facet_normal_.resize(ne);
  m.h_facet_.resize(ne);
  for (Index k = 0; k < ne; ++k) {
    for (int i = 0; i < nloc; ++i) {
      const Point& g = m.grad_lambda_[k][i];
      m.facet_normal_[k][i] = (-1.0 / norm(g)) * g;
      m.h_facet_[k][i] = m.elem_measure_[k] / m.facet_measure_[m.elem_facets_[k][i]];
    }
  }
  return m;
}

double MeshLevel::barycentric(Index k, int i, const Point& x) const {
  // lambda_i vanishes at every other vertex j of the element.
  const int j = i == 0 ? 1 : 0;
  return dot(grad_lambda_[k][i], x - vertices_[elements_[k][j]]);
}

double MeshLevel::max_element_diameter() const {
  double dmax = 0.0;
  for (const auto& s : elements_) {
    for (int a = 0; a <= dim_; ++a) {
      for (int b = a + 1; b <= dim_; ++b) dmax = std::max(dmax, norm(vertices_[s[a]] - vertices_[s[b]]));
    }
  }
  return dmax;
}

double MeshLevel::total_measure() const {
  // Pairwise summation keeps the 1e-12 measure invariant on large meshes.
  std::vector<double> work = elem_measure_;
  while (work.size() > 1) {
    std::vector<double> next((work.size() + 1) / 2, 0.0);
    for (std::size_t i = 0; i < work.size(); ++i) next[i / 2] += work[i];
    work.swap(next);
  }
  return work.empty() ? 0.0 : work[0];
}

Index MeshLevel::find_facet(const FacetKey& key) const {
  auto it = std::lower_bound(facets_.begin(), facets_.end(), key);
  if (it == facets_.end() || *it != key) return kNoIndex;
  return static_cast<Index>(it - facets_.begin());
}

RefinedMesh refine_uniform(const MeshLevel& coarse) {
  const int dim = coarse.dim();
  const int nloc = dim + 1;
  const Index nv = coarse.num_vertices();

  // Edges sorted and deduplicated; midpoint of edge e gets vertex nv + e.
  std::vector<std::array<Index, 2>> edges;
  for (Index k = 0; k < coarse.num_elements(); ++k) {
    const auto& s = coarse.element(k);
    for (int a = 0; a < nloc; ++a) {
      for (int b = a + 1; b < nloc; ++b) edges.push_back({std::min(s[a], s[b]), std::max(s[a], s[b])});
    }
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

  std::vector<Point> vertices(coarse.vertices().begin(), coarse.vertices().end());
  std::vector<std::array<Index, 2>> vertex_parent(nv);
  for (Index v = 0; v < nv; ++v) vertex_parent[v] = {v, kNoIndex};
  for (const auto& e : edges) {
    vertices.push_back(0.5 * (coarse.vertex(e[0]) + coarse.vertex(e[1])));
    vertex_parent.push_back(e);
  }
  auto midpoint = [&](Index a, Index b) {
    const std::array<Index, 2> key{std::min(a, b), std::max(a, b)};
    auto it = std::lower_bound(edges.begin(), edges.end(), key);
    return nv + static_cast<Index>(it - edges.begin());
  };

  std::vector<MeshLevel::Simplex> elements;
  RefinedMesh out;
  out.maps.child_elems.resize(coarse.num_elements());
  for (Index k = 0; k < coarse.num_elements(); ++k) {
    const auto& s = coarse.element(k);
    std::vector<MeshLevel::Simplex> kids;
    if (dim == 2) {
      const Index x0 = s[0], x1 = s[1], x2 = s[2];
      const Index x01 = midpoint(x0, x1), x02 = midpoint(x0, x2), x12 = midpoint(x1, x2);
      kids = {{x0, x01, x02, kNoIndex}, {x01, x1, x12, kNoIndex}, {x02, x12, x2, kNoIndex}, {x01, x02, x12, kNoIndex}};
    } else {
      const Index x0 = s[0], x1 = s[1], x2 = s[2], x3 = s[3];
      const Index x01 = midpoint(x0, x1), x02 = midpoint(x0, x2), x03 = midpoint(x0, x3);
      const Index x12 = midpoint(x1, x2), x13 = midpoint(x1, x3), x23 = midpoint(x2, x3);
      kids = {{x0, x01, x02, x03},   {x01, x1, x12, x13},  {x02, x12, x2, x23},  {x03, x13, x23, x3},
              {x01, x02, x03, x13},  {x01, x02, x12, x13}, {x02, x03, x13, x23}, {x02, x12, x13, x23}};
    }
    for (const auto& kid : kids) {
      out.maps.child_elems[k].push_back(static_cast<Index>(elements.size()));
      out.maps.elem_parent.push_back(k);
      elements.push_back(kid);
    }
  }

  out.fine = MeshLevel::from_elements(dim, std::move(vertices), std::move(elements));
  const MeshLevel& fine = out.fine;

  out.maps.facet_parent.resize(fine.num_facets());
  for (Index f = 0; f < fine.num_facets(); ++f) {
    std::vector<Index> support;
    for (int j = 0; j < dim; ++j) {
      for (Index p : vertex_parent[fine.facet(f)[j]]) {
        if (p != kNoIndex) support.push_back(p);
      }
    }
    std::sort(support.begin(), support.end());
    support.erase(std::unique(support.begin(), support.end()), support.end());
    if (static_cast<int>(support.size()) == dim) {
      MeshLevel::FacetKey key{kNoIndex, kNoIndex, kNoIndex};
      std::copy(support.begin(), support.end(), key.begin());
      const Index cf = coarse.find_facet(key);
      if (cf == kNoIndex) throw std::logic_error("refined facet lost its coarse facet");
      out.maps.facet_parent[f] = {FacetParent::Kind::OnCoarseFacet, cf};
    } else {
      out.maps.facet_parent[f] = {FacetParent::Kind::InteriorOfCoarseElement,
                                  out.maps.elem_parent[fine.facet_elems(f)[0]]};
    }
  }
  return out;
}

MeshHierarchy::MeshHierarchy(MeshLevel coarse, int num_levels) {
  if (num_levels < 1) throw std::invalid_argument("hierarchy needs at least one level");
  levels_.push_back(std::move(coarse));
  for (int l = 1; l < num_levels; ++l) {
    RefinedMesh r = refine_uniform(levels_.back());
    levels_.push_back(std::move(r.fine));
    maps_.push_back(std::move(r.maps));
  }
}

namespace {

// Kuhn simplices of the unit cell anchored at `origin`, one per axis permutation.
template <class VertexId>
void kuhn_cell(int dim, const std::array<int, 3>& origin, VertexId&& vid, std::vector<MeshLevel::Simplex>& out) {
  std::array<int, 3> perm{0, 1, 2};
  do {
    MeshLevel::Simplex s{kNoIndex, kNoIndex, kNoIndex, kNoIndex};
    std::array<int, 3> c = origin;
    s[0] = vid(c);
    for (int j = 0; j < dim; ++j) {
      c[perm[j]] += 1;
      s[j + 1] = vid(c);
    }
    out.push_back(s);
  } while (std::next_permutation(perm.begin(), perm.begin() + dim));
}

}  // namespace

MeshLevel build_unit_box_mesh_cells(int dim, int n) {
  if (dim != 2 && dim != 3) throw std::invalid_argument("dim must be 2 or 3");
  if (n < 1) throw std::invalid_argument("need at least one cell per axis");
  const int np = n + 1;
  std::vector<Point> vertices;
  const int nz = dim == 3 ? np : 1;
  for (int k = 0; k < nz; ++k) {
    for (int j = 0; j < np; ++j) {
      for (int i = 0; i < np; ++i) vertices.push_back({double(i) / n, double(j) / n, dim == 3 ? double(k) / n : 0.0});
    }
  }
  auto vid = [np](const std::array<int, 3>& c) { return static_cast<Index>(c[0] + np * (c[1] + np * c[2])); };
  std::vector<MeshLevel::Simplex> elements;
  const int cz = dim == 3 ? n : 1;
  for (int k = 0; k < cz; ++k) {
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) kuhn_cell(dim, {i, j, k}, vid, elements);
    }
  }
  return MeshLevel::from_elements(dim, std::move(vertices), std::move(elements));
}

MeshLevel build_unit_box_mesh(int dim, double target_h) {
  if (!(target_h > 0.0)) throw std::invalid_argument("target_h must be positive");
  // Kuhn simplices of an n-grid have diameter sqrt(dim)/n.
  const int n = std::max(1, static_cast<int>(std::ceil(std::sqrt(double(dim)) / target_h - 1e-12)));
  return build_unit_box_mesh_cells(dim, n);
}

MeshLevel build_step_domain_mesh(int dim, double target_h) {
  if (dim != 2 && dim != 3) throw std::invalid_argument("dim must be 2 or 3");
  if (!(target_h > 0.0)) throw std::invalid_argument("target_h must be positive");
  // Square cells of side 0.5/k so the re-entrant corner (0.5, 0.5) is a grid vertex.
  const int k = std::max(1, static_cast<int>(std::ceil(0.5 * std::sqrt(double(dim)) / target_h - 1e-12)));
  const double s = 0.5 / k;
  const int nx = 10 * k, ny = 2 * k, nz = dim == 3 ? 2 * k : 0;
  auto inside = [k](int i, int j) { return !(i < k && j < k); };

  std::vector<Index> grid_id(static_cast<std::size_t>(nx + 1) * (ny + 1) * (nz + 1), kNoIndex);
  auto gidx = [&](const std::array<int, 3>& c) {
    return static_cast<std::size_t>(c[0]) + (nx + 1) * (static_cast<std::size_t>(c[1]) + (ny + 1) * c[2]);
  };
  std::vector<Point> vertices;
  auto vid = [&](const std::array<int, 3>& c) {
    Index& id = grid_id[gidx(c)];
    if (id == kNoIndex) {
      id = static_cast<Index>(vertices.size());
      vertices.push_back({c[0] * s, c[1] * s, c[2] * s});
    }
    return id;
  };
  std::vector<MeshLevel::Simplex> elements;
  const int cz = dim == 3 ? nz : 1;
  for (int c = 0; c < cz; ++c) {
    for (int j = 0; j < ny; ++j) {
      for (int i = 0; i < nx; ++i) {
        if (inside(i, j)) kuhn_cell(dim, {i, j, c}, vid, elements);
      }
    }
  }
  return MeshLevel::from_elements(dim, std::move(vertices), std::move(elements));
}

void write_mesh_text(const MeshLevel& mesh, std::ostream& out) {
  const int d = mesh.dim();
  for (const Point& p : mesh.vertices()) {
    out << "v " << p[0] << ' ' << p[1];
    if (d == 3) out << ' ' << p[2];
    out << '\n';
  }
  for (Index k = 0; k < mesh.num_elements(); ++k) {
    out << 'e';
    for (int j = 0; j <= d; ++j) out << ' ' << mesh.element(k)[j];
    out << '\n';
  }
}

}  // namespace hdg
