#include "hdgmg/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace hdg {

double qk0(const MeshLevel& mesh, Index k, const ScalarField& g) {
  return mesh.elem_measure(k) * g(mesh.elem_barycenter(k));
}

double qk1(const MeshLevel& mesh, Index k, const ScalarField& g) {
  const int n = mesh.nodes_per_element();
  double sum = 0.0;
  for (int i = 0; i < n; ++i) sum += g(mesh.facet_barycenter(mesh.elem_facet(k, i)));
  return mesh.elem_measure(k) / n * sum;
}

double qf0(const MeshLevel& mesh, Index f, const ScalarField& g) {
  return mesh.facet_measure(f) * g(mesh.facet_barycenter(f));
}

double qdk0(const MeshLevel& mesh, Index k, const ScalarField& g) {
  double sum = 0.0;
  for (int i = 0; i < mesh.nodes_per_element(); ++i) sum += qf0(mesh, mesh.elem_facet(k, i), g);
  return sum;
}

QuadratureRule qk0_rule(const MeshLevel& mesh, Index k) {
  return {{mesh.elem_barycenter(k)}, {mesh.elem_measure(k)}};
}

QuadratureRule qk1_rule(const MeshLevel& mesh, Index k) {
  QuadratureRule r;
  const int n = mesh.nodes_per_element();
  for (int i = 0; i < n; ++i) {
    r.points.push_back(mesh.facet_barycenter(mesh.elem_facet(k, i)));
    r.weights.push_back(mesh.elem_measure(k) / n);
  }
  return r;
}

namespace {

// All multi-indices of length `len` with entries summing to `total`.
void compositions(int len, int total, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
  if (static_cast<int>(cur.size()) == len - 1) {
    cur.push_back(total);
    out.push_back(cur);
    cur.pop_back();
    return;
  }
  for (int a = total; a >= 0; --a) {
    cur.push_back(a);
    compositions(len, total - a, cur, out);
    cur.pop_back();
  }
}

BarycentricRule make_grundmann_moller(int dim, int s) {
  BarycentricRule rule;
  const int n = dim;
  double weight_sum = 0.0;
  for (int i = 0; i <= s; ++i) {
    const int denom = n + 2 * s + 1 - 2 * i;
    // (-1)^i 2^{-2s} denom^{2s+1} / (i! (n+2s+1-i)!), integral over a simplex of volume 1/n!.
    double w = std::pow(2.0, -2.0 * s) * std::pow(double(denom), 2 * s + 1) / std::tgamma(i + 1.0) /
               std::tgamma(double(n + 2 * s + 1 - i) + 1.0);
    if (i % 2 == 1) w = -w;
    w *= std::tgamma(n + 1.0);
    std::vector<std::vector<int>> betas;
    std::vector<int> cur;
    compositions(n + 1, s - i, cur, betas);
    for (const auto& b : betas) {
      std::array<double, 4> p{0.0, 0.0, 0.0, 0.0};
      for (int j = 0; j <= n; ++j) p[j] = (2.0 * b[j] + 1.0) / denom;
      rule.points.push_back(p);
      rule.weights.push_back(w);
      weight_sum += w;
    }
  }
  if (std::abs(weight_sum - 1.0) > 1e-12) throw std::logic_error("Grundmann-Moeller weights do not sum to one");
  return rule;
}

}  // namespace

const BarycentricRule& grundmann_moller(int dim, int s) {
  if (dim < 1 || dim > 3 || s < 0) throw std::invalid_argument("unsupported Grundmann-Moeller rule");
  static std::mutex mutex;
  static std::map<std::pair<int, int>, BarycentricRule> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find({dim, s});
  if (it == cache.end()) it = cache.emplace(std::make_pair(dim, s), make_grundmann_moller(dim, s)).first;
  return it->second;
}

QuadratureRule error_rule(const MeshLevel& mesh, Index k) {
  const BarycentricRule& ref = grundmann_moller(mesh.dim(), 2);
  const auto& s = mesh.element(k);
  QuadratureRule r;
  r.points.reserve(ref.points.size());
  r.weights.reserve(ref.points.size());
  for (std::size_t q = 0; q < ref.points.size(); ++q) {
    Point x{0.0, 0.0, 0.0};
    for (int j = 0; j <= mesh.dim(); ++j) x = x + ref.points[q][j] * mesh.vertex(s[j]);
    r.points.push_back(x);
    r.weights.push_back(ref.weights[q] * mesh.elem_measure(k));
  }
  return r;
}

double error_quadrature(const MeshLevel& mesh, Index k, const ScalarField& g) {
  const QuadratureRule r = error_rule(mesh, k);
  double sum = 0.0;
  for (std::size_t q = 0; q < r.points.size(); ++q) sum += r.weights[q] * g(r.points[q]);
  return sum;
}

}  // namespace hdg
