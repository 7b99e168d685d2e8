#include "hdgmg/spaces.hpp"

#include <stdexcept>

namespace hdg {

FacetSpace::FacetSpace(const MeshLevel& mesh, int components, const FacetPredicate& dirichlet)
    : mesh_(&mesh), components_(components) {
  if (components != 1 && components != mesh.dim()) throw std::invalid_argument("components must be 1 or dim");
  const Index nf = mesh.num_facets();
  first_dof_.assign(nf, kNoIndex);
  Index next = 0;
  for (Index f = 0; f < nf; ++f) {
    if (mesh.is_boundary(f) && dirichlet && dirichlet(f)) continue;
    first_dof_[f] = next;
    next += components;
    dof_facet_.push_back(f);
  }
  const double share = 1.0 / mesh.nodes_per_element();
  weights_.assign(next, 0.0);
  for (std::size_t j = 0; j < dof_facet_.size(); ++j) {
    const Index f = dof_facet_[j];
    double w = 0.0;
    for (Index k : mesh.facet_elems(f)) {
      if (k != kNoIndex) w += share * mesh.elem_measure(k);
    }
    for (int c = 0; c < components; ++c) weights_[j * components + c] = w;
  }
}

double FacetSpace::inner(std::span<const double> a, std::span<const double> b) const {
  double s = 0.0;
  for (std::size_t i = 0; i < weights_.size(); ++i) s += weights_[i] * a[i] * b[i];
  return s;
}

std::vector<double> FacetSpace::expand(std::span<const double> free_values, std::span<const double> boundary) const {
  const Index nf = mesh_->num_facets();
  std::vector<double> out(static_cast<std::size_t>(nf) * components_, 0.0);
  for (Index f = 0; f < nf; ++f) {
    for (int c = 0; c < components_; ++c) {
      const std::size_t slot = static_cast<std::size_t>(f) * components_ + c;
      if (first_dof_[f] != kNoIndex) {
        out[slot] = free_values[first_dof_[f] + c];
      } else if (!boundary.empty()) {
        out[slot] = boundary[slot];
      }
    }
  }
  return out;
}

FacetSpace::FacetPredicate all_boundary_dirichlet() {
  return [](Index) { return true; };
}

PressureSpace::PressureSpace(const MeshLevel& mesh) {
  measures_.resize(mesh.num_elements());
  for (Index k = 0; k < mesh.num_elements(); ++k) measures_[k] = mesh.elem_measure(k);
}

double PressureSpace::mean(std::span<const double> p) const {
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < measures_.size(); ++k) {
    num += measures_[k] * p[k];
    den += measures_[k];
  }
  return num / den;
}

void PressureSpace::project_mean_zero(std::span<double> p) const {
  const double m = mean(p);
  for (double& v : p) v -= m;
}

Point cr_basis_gradient(const MeshLevel& mesh, Index k, int i) {
  return (-double(mesh.dim())) * mesh.grad_lambda(k, i);
}

double cr_basis_value(const MeshLevel& mesh, Index k, int i, const Point& x) {
  return 1.0 - mesh.dim() * mesh.barycentric(k, i, x);
}

Point cr_gradient(const MeshLevel& mesh, Index k, std::span<const double> values) {
  Point g{0.0, 0.0, 0.0};
  for (int i = 0; i < mesh.nodes_per_element(); ++i) g = g + values[i] * cr_basis_gradient(mesh, k, i);
  return g;
}

double cr_divergence(const MeshLevel& mesh, Index k, std::span<const double> values) {
  const int d = mesh.dim();
  double div = 0.0;
  for (int i = 0; i <= d; ++i) {
    const Point g = cr_basis_gradient(mesh, k, i);
    for (int c = 0; c < d; ++c) div += values[i * d + c] * g[c];
  }
  return div;
}

}  // namespace hdg
