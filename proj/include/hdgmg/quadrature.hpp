#pragma once

#include <functional>
#include <vector>

#include "hdgmg/mesh.hpp"

namespace hdg {

using ScalarField = std::function<double(const Point&)>;

/// Points in physical coordinates with weights summing to the cell measure.
struct QuadratureRule {
  std::vector<Point> points;
  std::vector<double> weights;
};

/// One-point barycenter rule |K| g(m_K).
double qk0(const MeshLevel& mesh, Index k, const ScalarField& g);
/// Facet-barycenter rule |K|/(d+1) sum_i g(m_K^i).
double qk1(const MeshLevel& mesh, Index k, const ScalarField& g);
/// One-point facet rule |F| g(m_F).
double qf0(const MeshLevel& mesh, Index f, const ScalarField& g);
/// Sum of qf0 over the d+1 facets of element k.
double qdk0(const MeshLevel& mesh, Index k, const ScalarField& g);

QuadratureRule qk0_rule(const MeshLevel& mesh, Index k);
QuadratureRule qk1_rule(const MeshLevel& mesh, Index k);

/// Grundmann-Moeller rule of degree 2s+1 on the unit reference simplex, as
/// barycentric points (d+1 coordinates) and weights summing to one.
struct BarycentricRule {
  std::vector<std::array<double, 4>> points;
  std::vector<double> weights;
};
const BarycentricRule& grundmann_moller(int dim, int s);

/// Degree-5 rule mapped to element k; used for error norms only.
QuadratureRule error_rule(const MeshLevel& mesh, Index k);
double error_quadrature(const MeshLevel& mesh, Index k, const ScalarField& g);

}  // namespace hdg
