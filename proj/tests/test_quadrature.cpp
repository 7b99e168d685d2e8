#include <doctest.h>

#include "hdgmg/quadrature.hpp"
#include "quadrature_oracle.hpp"

using namespace hdg;

namespace {

std::vector<Point> facet_points(const MeshLevel& m, Index f) {
  std::vector<Point> v;
  for (int j = 0; j < m.nodes_per_facet(); ++j) v.push_back(m.vertex(m.facet(f)[j]));
  return v;
}

}  // namespace

TEST_CASE("element and facet rules integrate the advertised polynomial degrees exactly") {
  std::mt19937 rng(20240601u);
  for (int d : {2, 3}) {
    for (int trial = 0; trial < 100; ++trial) {
      const std::vector<Point> v = test::random_simplex(d, rng);
      const MeshLevel m = test::single_simplex_mesh(v);
      const test::Quadratic lin = test::random_quadratic(d, true, rng);
      const test::Quadratic quad = test::random_quadratic(d, false, rng);
      const double exact_lin = test::integrate_quadratic(lin, v);
      CHECK(qk0(m, 0, lin) == doctest::Approx(exact_lin).epsilon(1e-12));
      CHECK(qk1(m, 0, lin) == doctest::Approx(exact_lin).epsilon(1e-12));
      if (d == 2) CHECK(qk1(m, 0, quad) == doctest::Approx(test::integrate_quadratic(quad, v)).epsilon(1e-12));
      CHECK(m.elem_measure(0) == doctest::Approx(test::simplex_volume(v)).epsilon(1e-13));
      double boundary_sum = 0.0;
      for (Index f = 0; f < m.num_facets(); ++f) {
        const std::vector<Point> fv = facet_points(m, f);
        const double exact = test::integrate_quadratic(lin, fv);
        CHECK(qf0(m, f, lin) == doctest::Approx(exact).epsilon(1e-12));
        boundary_sum += exact;
      }
      CHECK(qdk0(m, 0, lin) == doctest::Approx(boundary_sum).epsilon(1e-12));
    }
  }
}

TEST_CASE("the facet-barycenter rule is not exact for quadratics in 3D") {
  // Documents the degree limit: x^2 on the reference tetrahedron.
  const std::vector<Point> v{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  const MeshLevel m = test::single_simplex_mesh(v);
  test::Quadratic q;
  q.h(0, 0) = 1.0;
  CHECK(std::abs(qk1(m, 0, q) - test::integrate_quadratic(q, v)) > 1e-3);
}

TEST_CASE("rules expose points and weights consistent with the scalar versions") {
  const MeshLevel m = test::perturbed_box_mesh(2, 2, 0.2, 3u);
  const ScalarField g = [](const Point& x) { return std::exp(x[0]) * std::cos(x[1]); };
  for (Index k = 0; k < m.num_elements(); ++k) {
    for (const auto& rule : {qk0_rule(m, k), qk1_rule(m, k)}) {
      double sw = 0.0;
      for (double w : rule.weights) sw += w;
      CHECK(sw == doctest::Approx(m.elem_measure(k)).epsilon(1e-14));
    }
    const QuadratureRule r1 = qk1_rule(m, k);
    double s = 0.0;
    for (std::size_t q = 0; q < r1.points.size(); ++q) s += r1.weights[q] * g(r1.points[q]);
    CHECK(s == doctest::Approx(qk1(m, k, g)).epsilon(1e-14));
  }
}

TEST_CASE("Grundmann-Moeller rule is exact to degree 5") {
  for (int d : {2, 3}) {
    const BarycentricRule& r = grundmann_moller(d, 2);
    double sw = 0.0;
    for (double w : r.weights) sw += w;
    CHECK(sw == doctest::Approx(1.0).epsilon(1e-14));
    // All barycentric monomials of total degree <= 5.
    std::array<int, 4> a{};
    for (a[0] = 0; a[0] <= 5; ++a[0]) {
      for (a[1] = 0; a[0] + a[1] <= 5; ++a[1]) {
        for (a[2] = 0; a[0] + a[1] + a[2] <= 5; ++a[2]) {
          for (a[3] = 0; a[0] + a[1] + a[2] + a[3] <= 5 && (d == 3 || a[3] == 0); ++a[3]) {
            double s = 0.0;
            for (std::size_t q = 0; q < r.points.size(); ++q) {
              double v = r.weights[q];
              for (int i = 0; i <= d; ++i) v *= std::pow(r.points[q][i], a[i]);
              s += v;
            }
            CHECK(s == doctest::Approx(test::integrate_barycentric_monomial(a, d, 1.0)).epsilon(1e-12));
          }
        }
      }
    }
  }
}

TEST_CASE("error quadrature integrates smooth functions accurately on a mesh") {
  const MeshLevel m = build_unit_box_mesh_cells(3, 4);
  double s = 0.0;
  for (Index k = 0; k < m.num_elements(); ++k) {
    s += error_quadrature(m, k, [](const Point& x) { return std::sin(M_PI * x[0]) * x[1] * x[1] * std::exp(x[2]); });
  }
  const double exact = (2.0 / M_PI) * (1.0 / 3.0) * (std::exp(1.0) - 1.0);
  CHECK(s == doctest::Approx(exact).epsilon(1e-5));
}
