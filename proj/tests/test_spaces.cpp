#include <doctest.h>

#include "hdgmg/quadrature.hpp"
#include "hdgmg/spaces.hpp"
#include "support.hpp"

using namespace hdg;

TEST_CASE("facet space numbering with and without Dirichlet facets") {
  const MeshLevel m = build_unit_box_mesh_cells(2, 3);
  Index boundary = 0;
  for (Index f = 0; f < m.num_facets(); ++f) boundary += m.is_boundary(f);
  const FacetSpace all(m, 1, all_boundary_dirichlet());
  CHECK(all.n_free() == m.num_facets() - boundary);
  const FacetSpace none(m, 1, {});
  CHECK(none.n_free() == m.num_facets());
  const FacetSpace vec(m, 2, all_boundary_dirichlet());
  CHECK(vec.n_free() == 2 * all.n_free());
  for (Index dof = 0; dof < vec.n_free(); ++dof) {
    CHECK(vec.dof(vec.facet_of(dof), vec.component_of(dof)) == dof);
    CHECK_FALSE(m.is_boundary(vec.facet_of(dof)));
  }
  // Only boundary facets are ever offered to the predicate.
  const FacetSpace left(m, 1, [&](Index f) {
    CHECK(m.is_boundary(f));
    return m.facet_barycenter(f)[0] < 1e-12;
  });
  CHECK(left.n_free() == m.num_facets() - 3);
  CHECK_THROWS_AS(FacetSpace(m, 3, {}), std::invalid_argument);
}

TEST_CASE("facet weights reproduce the lumped Q1 inner product") {
  const MeshLevel m = test::perturbed_box_mesh(3, 2, 0.2, 4u);
  const FacetSpace s(m, 1, {});
  std::vector<double> ones(s.n_free(), 1.0);
  // With no Dirichlet facets, (1, 1) is the domain measure.
  CHECK(s.inner(ones, ones) == doctest::Approx(1.0).epsilon(1e-13));
  // (u, v) equals sum_K Q1(u v) for the CR functions with these facet values.
  std::vector<double> u(s.n_free()), v(s.n_free());
  for (Index i = 0; i < s.n_free(); ++i) {
    u[i] = std::sin(1.0 + i);
    v[i] = std::cos(2.0 * i);
  }
  double ref = 0.0;
  for (Index k = 0; k < m.num_elements(); ++k) {
    for (int i = 0; i <= 3; ++i) {
      const Index f = m.elem_facet(k, i);
      ref += m.elem_measure(k) / 4.0 * u[s.dof(f)] * v[s.dof(f)];
    }
  }
  CHECK(s.inner(u, v) == doctest::Approx(ref).epsilon(1e-13));
}

TEST_CASE("expand fills Dirichlet facets from boundary data") {
  const MeshLevel m = build_unit_box_mesh_cells(2, 2);
  const FacetSpace s(m, 2, all_boundary_dirichlet());
  std::vector<double> free(s.n_free());
  for (Index i = 0; i < s.n_free(); ++i) free[i] = i;
  std::vector<double> bnd(m.num_facets() * 2, -7.0);
  const std::vector<double> out = s.expand(free, bnd);
  for (Index f = 0; f < m.num_facets(); ++f) {
    for (int c = 0; c < 2; ++c) {
      CHECK(out[f * 2 + c] == (s.is_dirichlet(f) ? -7.0 : double(s.dof(f, c))));
    }
  }
  const std::vector<double> zero_bc = s.expand(free);
  for (Index f = 0; f < m.num_facets(); ++f) {
    if (s.is_dirichlet(f)) CHECK(zero_bc[f * 2] == 0.0);
  }
}

TEST_CASE("CR basis: nodal at facet barycenters, consistent gradients") {
  std::mt19937 rng(8u);
  for (int d : {2, 3}) {
    for (int trial = 0; trial < 20; ++trial) {
      const MeshLevel m = test::single_simplex_mesh(test::random_simplex(d, rng));
      for (int i = 0; i <= d; ++i) {
        for (int j = 0; j <= d; ++j) {
          const Point& mf = m.facet_barycenter(m.elem_facet(0, j));
          CHECK(cr_basis_value(m, 0, i, mf) == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-12));
        }
        // Central differences are exact for affine functions.
        const Point g = cr_basis_gradient(m, 0, i);
        const Point x = m.elem_barycenter(0);
        for (int c = 0; c < d; ++c) {
          Point xp = x, xm = x;
          xp[c] += 1e-3;
          xm[c] -= 1e-3;
          const double fd = (cr_basis_value(m, 0, i, xp) - cr_basis_value(m, 0, i, xm)) / 2e-3;
          CHECK(g[c] == doctest::Approx(fd).epsilon(1e-8));
        }
        // grad phi_i = |F_i| n_i / |K|
        const Index f = m.elem_facet(0, i);
        for (int c = 0; c < d; ++c) {
          CHECK(g[c] == doctest::Approx(m.facet_measure(f) * m.facet_normal(0, i)[c] / m.elem_measure(0)).epsilon(1e-12));
        }
      }
      // An affine field interpolated at the facet barycenters is reproduced.
      const Point a{0.3, -1.2, 0.7};
      const Eigen::Matrix3d b = Eigen::Matrix3d::Random();
      std::vector<double> scal(d + 1), vec((d + 1) * d);
      for (int i = 0; i <= d; ++i) {
        const Point& mf = m.facet_barycenter(m.elem_facet(0, i));
        scal[i] = 2.0 + dot(a, mf);
        for (int c = 0; c < d; ++c) {
          double s = 0.0;
          for (int e = 0; e < d; ++e) s += b(c, e) * mf[e];
          vec[i * d + c] = s;
        }
      }
      const Point g = cr_gradient(m, 0, scal);
      for (int c = 0; c < d; ++c) CHECK(g[c] == doctest::Approx(a[c]).epsilon(1e-12));
      CHECK(cr_divergence(m, 0, vec) == doctest::Approx(b.topLeftCorner(d, d).trace()).epsilon(1e-11));
    }
  }
}

TEST_CASE("pressure space mean and projection") {
  const MeshLevel m = test::perturbed_box_mesh(2, 3, 0.2, 2u);
  const PressureSpace p(m);
  CHECK(p.size() == m.num_elements());
  std::vector<double> q(p.size());
  for (Index k = 0; k < p.size(); ++k) q[k] = m.elem_barycenter(k)[0];
  CHECK(p.mean(q) == doctest::Approx(0.5).epsilon(1e-12));
  p.project_mean_zero(q);
  CHECK(std::abs(p.mean(q)) < 1e-15);
}
