#include <doctest.h>

#include "hdgmg/experiments.hpp"
#include "hdgmg/hdg_diffusion.hpp"
#include "support.hpp"

using namespace hdg;

namespace {

DiffusionProblem variable_problem(bool with_dirichlet_data) {
  DiffusionProblem p;
  p.alpha = [](const Point& x) { return 1.0 + x[0] * x[0] + 0.5 * x[1]; };
  p.beta = [](const Point& x) { return 2.0 + std::sin(3.0 * x[0] + x[2]); };
  p.f = [](const Point& x) { return std::cos(x[0] - 2.0 * x[1]) + x[2]; };
  if (with_dirichlet_data) p.dirichlet = [](const Point& x) { return 1.0 + x[0] - x[1] * x[1]; };
  return p;
}

// Dirichlet on the faces x = 0 and y = 0 only; the rest is natural.
FacetSpace::FacetPredicate partial_dirichlet(const MeshLevel& m) {
  return [&m](Index f) {
    const Point& x = m.facet_barycenter(f);
    return x[0] < 1e-12 || x[1] < 1e-12;
  };
}

// The condensed matrix written as a Crouzeix-Raviart stiffness plus a
// gamma-scaled lumped mass, assembled densely from the closed-form expressions.
test::SchurResult cr_form(const FacetSpace& s, const DiffusionProblem& p) {
  const MeshLevel& m = s.mesh();
  const int d = m.dim(), n = d + 1;
  const std::vector<double> ah = element_alpha_h(m, p);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(s.n_free(), s.n_free());
  Eigen::VectorXd b = Eigen::VectorXd::Zero(s.n_free());
  for (Index k = 0; k < m.num_elements(); ++k) {
    const double vol = m.elem_measure(k);
    std::array<Eigen::Vector3d, 4> g;
    std::array<double, 4> gamma{}, beta{}, f{}, gval{};
    for (int i = 0; i < n; ++i) {
      const Index fi = m.elem_facet(k, i);
      const Point nn = m.facet_normal(k, i);
      g[i] = Eigen::Vector3d(nn[0], nn[1], nn[2]) * m.facet_measure(fi) / vol;
      const double hi = vol / m.facet_measure(fi);
      const Point& mf = m.facet_barycenter(fi);
      beta[i] = p.beta(mf);
      f[i] = p.f(mf);
      gamma[i] = ah[k] / (ah[k] + hi * hi * beta[i] / n);
      gval[i] = (s.is_dirichlet(fi) && p.dirichlet) ? p.dirichlet(mf) : 0.0;
    }
    for (int i = 0; i < n; ++i) {
      const Index ri = s.dof(m.elem_facet(k, i));
      if (ri == kNoIndex) continue;
      b[ri] += vol / n * gamma[i] * f[i];
      for (int j = 0; j < n; ++j) {
        double v = ah[k] * vol * g[i].dot(g[j]);
        if (i == j) v += vol / n * gamma[i] * beta[i];
        const Index cj = s.dof(m.elem_facet(k, j));
        if (cj == kNoIndex) {
          b[ri] -= v * gval[j];
        } else {
          a(ri, cj) += v;
        }
      }
    }
  }
  return {a, b};
}

}  // namespace

TEST_CASE("condensed diffusion system equals the Schur complement of the full HDG system") {
  for (int d : {2, 3}) {
    const MeshLevel m = test::perturbed_box_mesh(d, d == 2 ? 6 : 2, 0.25, 17u);
    for (bool partial : {false, true}) {
      const FacetSpace s(m, 1, partial ? partial_dirichlet(m) : all_boundary_dirichlet());
      const DiffusionProblem p = variable_problem(true);
      const CondensedDiffusionSystem c = assemble_condensed_diffusion(s, p);
      const FullHdgSystem full = assemble_full_hdg_diffusion(s, p);
      CHECK(full.n_hat == s.n_free());
      const test::SchurResult sc = test::schur_complement(full.matrix, full.rhs, full.n_flux + full.n_local);
      const Eigen::MatrixXd a = test::to_eigen_dense(c.matrix);
      CHECK(test::rel_frobenius(a, sc.matrix) <= 1e-11);
      CHECK(test::rel_diff(test::to_eigen(c.rhs), sc.rhs) <= 1e-11);
      const test::SchurResult cr = cr_form(s, p);
      CHECK(test::rel_frobenius(a, cr.matrix) <= 1e-12);
      CHECK(test::rel_diff(test::to_eigen(c.rhs), cr.rhs) <= 1e-12);
    }
  }
}

TEST_CASE("condensed diffusion matrix is symmetric positive definite") {
  for (int d : {2, 3}) {
    const MeshLevel m = test::perturbed_box_mesh(d, d == 2 ? 5 : 2, 0.2, 5u);
    const FacetSpace s(m, 1, partial_dirichlet(m));
    DiffusionProblem p = variable_problem(false);
    for (bool reaction : {true, false}) {
      if (!reaction) p.beta = {};
      const CondensedDiffusionSystem c = assemble_condensed_diffusion(s, p);
      CHECK(c.matrix.is_symmetric(1e-14));
      Eigen::LLT<Eigen::MatrixXd> llt(test::to_eigen_dense(c.matrix));
      CHECK(llt.info() == Eigen::Success);
    }
  }
}

TEST_CASE("without reaction the local scaling is the identity") {
  const MeshLevel m = build_unit_box_mesh_cells(2, 2);
  DiffusionProblem p;
  p.alpha = [](const Point&) { return 2.0; };
  p.f = [](const Point&) { return 1.0; };
  for (Index k = 0; k < m.num_elements(); ++k) {
    const DiffusionLocal loc = diffusion_local(m, k, p, 2.0);
    for (int i = 0; i < 3; ++i) {
      CHECK(loc.gamma[i] == 1.0);
      CHECK(loc.tau[i] == doctest::Approx(2.0 / m.h_facet(k, i)));
    }
  }
  CHECK(element_alpha_h(m, p)[0] == doctest::Approx(2.0));
  p.alpha_h = {1.0};
  CHECK_THROWS_AS(element_alpha_h(m, p), std::invalid_argument);
}

TEST_CASE("local recovery reproduces the full HDG solution and the energy identity") {
  for (int d : {2, 3}) {
    const MeshLevel m = test::perturbed_box_mesh(d, d == 2 ? 5 : 2, 0.2, 23u);
    const FacetSpace s(m, 1, partial_dirichlet(m));
    for (bool data : {false, true}) {
      const DiffusionProblem p = variable_problem(data);
      const CondensedDiffusionSystem c = assemble_condensed_diffusion(s, p);
      const Eigen::VectorXd uh = test::to_eigen_dense(c.matrix).llt().solve(test::to_eigen(c.rhs));
      const DiffusionSolution rec = recover_local_diffusion(m, p, c.alpha_h, s.expand(test::from_eigen(uh), c.boundary));

      const FullHdgSystem full = assemble_full_hdg_diffusion(s, p);
      Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(test::to_eigen_sparse(full.matrix));
      const Eigen::VectorXd x = lu.solve(test::to_eigen(full.rhs));
      const DiffusionSolution ref = split_full_diffusion(s, full, test::from_eigen(x), c.boundary);
      for (Index k = 0; k < m.num_elements(); ++k) {
        for (int c2 = 0; c2 < d; ++c2) CHECK(rec.sigma[k][c2] == doctest::Approx(ref.sigma[k][c2]).epsilon(1e-9));
        for (int i = 0; i <= d; ++i) CHECK(rec.u[k][i] == doctest::Approx(ref.u[k][i]).epsilon(1e-9));
      }
      if (!data) {
        const EnergyBalance e = diffusion_energy(m, p, c.alpha_h, rec);
        CHECK(e.lhs > 0.0);
        CHECK(e.lhs == doctest::Approx(e.rhs).epsilon(1e-11));
      }
    }
  }
}

TEST_CASE("affine solutions are reproduced exactly") {
  for (int d : {2, 3}) {
    const MeshLevel m = test::perturbed_box_mesh(d, 3, 0.2, 31u);
    const FacetSpace s(m, 1, all_boundary_dirichlet());
    DiffusionProblem p;
    p.alpha = [](const Point&) { return 3.0; };
    p.dirichlet = [](const Point& x) { return 0.5 + 2.0 * x[0] - x[1] + 0.25 * x[2]; };
    const CondensedDiffusionSystem c = assemble_condensed_diffusion(s, p);
    const Eigen::VectorXd uh = test::to_eigen_dense(c.matrix).llt().solve(test::to_eigen(c.rhs));
    for (Index dof = 0; dof < s.n_free(); ++dof) {
      CHECK(uh[dof] == doctest::Approx(p.dirichlet(m.facet_barycenter(s.facet_of(dof)))).epsilon(1e-10));
    }
    const DiffusionSolution sol = recover_local_diffusion(m, p, c.alpha_h, s.expand(test::from_eigen(uh), c.boundary));
    const DiffusionErrors e = diffusion_error_norms(
        m, sol, p.dirichlet, [d](const Point&) { return Point{-6.0, 3.0, d == 3 ? -0.75 : 0.0}; });
    CHECK(e.u < 1e-10);
    CHECK(e.sigma < 1e-9);
  }
}

TEST_CASE("manufactured diffusion data is consistent") {
  // Check f = -div(alpha grad u) + beta u by central differences of sigma.
  for (int d : {2, 3}) {
    const ManufacturedDiffusion man = manufactured_diffusion(d);
    const Point x{0.31, 0.62, 0.47};
    const double hstep = 1e-4;
    double div = 0.0;
    for (int c = 0; c < d; ++c) {
      Point xp = x, xm = x;
      xp[c] += hstep;
      xm[c] -= hstep;
      div += (man.sigma(xp)[c] - man.sigma(xm)[c]) / (2 * hstep);
      const double du = (man.u(xp) - man.u(xm)) / (2 * hstep);
      CHECK(man.sigma(x)[c] == doctest::Approx(-man.problem.alpha(x) * du).epsilon(1e-7));
    }
    CHECK(man.problem.f(x) == doctest::Approx(div + man.problem.beta(x) * man.u(x)).epsilon(1e-6));
  }
}

TEST_CASE("errors decrease at the optimal rates on the manufactured problem") {
  const ManufacturedDiffusion man = manufactured_diffusion(2);
  MeshHierarchy h(build_unit_box_mesh_cells(2, 4), 3);
  std::vector<DiffusionErrors> errs;
  for (int l = 0; l < 3; ++l) {
    const FacetSpace s(h.level(l), 1, all_boundary_dirichlet());
    const CondensedDiffusionSystem c = assemble_condensed_diffusion(s, man.problem);
    Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> llt(test::to_eigen_sparse(c.matrix));
    const Eigen::VectorXd uh = llt.solve(test::to_eigen(c.rhs));
    const DiffusionSolution sol =
        recover_local_diffusion(h.level(l), man.problem, c.alpha_h, s.expand(test::from_eigen(uh), c.boundary));
    errs.push_back(diffusion_error_norms(h.level(l), sol, man.u, man.sigma));
  }
  CHECK(std::log2(errs[1].u / errs[2].u) == doctest::Approx(2.0).epsilon(0.05));
  CHECK(std::log2(errs[1].sigma / errs[2].sigma) == doctest::Approx(1.0).epsilon(0.05));
}
