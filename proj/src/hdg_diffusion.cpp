#include "hdgmg/hdg_diffusion.hpp"

#include <cmath>
#include <stdexcept>

namespace hdg {

std::vector<double> element_alpha_h(const MeshLevel& mesh, const DiffusionProblem& problem) {
  if (!problem.alpha_h.empty()) {
    if (problem.alpha_h.size() != static_cast<std::size_t>(mesh.num_elements())) {
      throw std::invalid_argument("alpha_h override has wrong size");
    }
    return problem.alpha_h;
  }
  std::vector<double> out(mesh.num_elements());
  for (Index k = 0; k < mesh.num_elements(); ++k) {
    const double avg_inv = qk1(mesh, k, [&](const Point& x) { return 1.0 / problem.alpha(x); }) / mesh.elem_measure(k);
    out[k] = 1.0 / avg_inv;
  }
  return out;
}

DiffusionLocal diffusion_local(const MeshLevel& mesh, Index k, const DiffusionProblem& problem, double alpha_h) {
  DiffusionLocal loc;
  loc.alpha_h = alpha_h;
  const int n = mesh.nodes_per_element();
  for (int i = 0; i < n; ++i) {
    const Point& m = mesh.facet_barycenter(mesh.elem_facet(k, i));
    const double h = mesh.h_facet(k, i);
    loc.h[i] = h;
    loc.tau[i] = alpha_h / h;
    loc.beta[i] = problem.beta ? problem.beta(m) : 0.0;
    loc.f[i] = problem.f ? problem.f(m) : 0.0;
    loc.gamma[i] = alpha_h / (alpha_h + h * h * loc.beta[i] / n);
  }
  return loc;
}

namespace {

std::vector<double> boundary_values(const FacetSpace& space, const ScalarField& g) {
  const MeshLevel& mesh = space.mesh();
  std::vector<double> out(mesh.num_facets(), 0.0);
  if (!g) return out;
  for (Index f = 0; f < mesh.num_facets(); ++f) {
    if (space.is_dirichlet(f)) out[f] = g(mesh.facet_barycenter(f));
  }
  return out;
}

}  // namespace

CondensedDiffusionSystem assemble_condensed_diffusion(const FacetSpace& space, const DiffusionProblem& problem) {
  if (space.components() != 1) throw std::invalid_argument("diffusion needs a scalar facet space");
  const MeshLevel& mesh = space.mesh();
  const int n = mesh.nodes_per_element();
  CondensedDiffusionSystem sys;
  sys.alpha_h = element_alpha_h(mesh, problem);
  sys.boundary = boundary_values(space, problem.dirichlet);
  sys.rhs.assign(space.n_free(), 0.0);
  std::vector<Triplet> trip;
  trip.reserve(static_cast<std::size_t>(mesh.num_elements()) * n * n);
  for (Index k = 0; k < mesh.num_elements(); ++k) {
    const DiffusionLocal loc = diffusion_local(mesh, k, problem, sys.alpha_h[k]);
    const double vol = mesh.elem_measure(k);
    std::array<Point, 4> grad{};
    for (int i = 0; i < n; ++i) grad[i] = cr_basis_gradient(mesh, k, i);
    for (int i = 0; i < n; ++i) {
      const Index row = space.dof(mesh.elem_facet(k, i));
      if (row == kNoIndex) continue;
      sys.rhs[row] += vol / n * loc.gamma[i] * loc.f[i];
      for (int j = 0; j < n; ++j) {
        double v = loc.alpha_h * vol * dot(grad[i], grad[j]);
        if (i == j) v += vol / n * loc.gamma[i] * loc.beta[i];
        const Index fj = mesh.elem_facet(k, j);
        const Index col = space.dof(fj);
        if (col == kNoIndex) {
          sys.rhs[row] -= v * sys.boundary[fj];
        } else {
          trip.push_back({row, col, v});
        }
      }
    }
  }
  sys.matrix = assemble_from_triplets(space.n_free(), space.n_free(), std::move(trip));
  return sys;
}

FullHdgSystem assemble_full_hdg_diffusion(const FacetSpace& space, const DiffusionProblem& problem) {
  if (space.components() != 1) throw std::invalid_argument("diffusion needs a scalar facet space");
  const MeshLevel& mesh = space.mesh();
  const int d = mesh.dim();
  const int n = d + 1;
  const Index ne = mesh.num_elements();
  FullHdgSystem sys;
  sys.n_flux = ne * d;
  sys.n_local = ne * n;
  sys.n_hat = space.n_free();
  const Index total = sys.n_flux + sys.n_local + sys.n_hat;
  sys.rhs.assign(total, 0.0);
  const std::vector<double> alpha_h = element_alpha_h(mesh, problem);
  const std::vector<double> g = boundary_values(space, problem.dirichlet);
  std::vector<Triplet> trip;

  auto sigma_idx = [&](Index k, int r) { return k * d + r; };
  auto u_idx = [&](Index k, int i) { return sys.n_flux + k * n + i; };
  auto hat_idx = [&](Index dof) { return sys.n_flux + sys.n_local + dof; };

  for (Index k = 0; k < ne; ++k) {
    const DiffusionLocal loc = diffusion_local(mesh, k, problem, alpha_h[k]);
    const double vol = mesh.elem_measure(k);
    // Constitutive equation tested with constant r.
    for (int r = 0; r < d; ++r) {
      trip.push_back({sigma_idx(k, r), sigma_idx(k, r), vol / loc.alpha_h});
      for (int i = 0; i < n; ++i) {
        const Index f = mesh.elem_facet(k, i);
        const double c = mesh.facet_measure(f) * mesh.facet_normal(k, i)[r];
        const Index dof = space.dof(f);
        if (dof == kNoIndex) {
          sys.rhs[sigma_idx(k, r)] -= c * g[f];
        } else {
          trip.push_back({sigma_idx(k, r), hat_idx(dof), c});
        }
      }
    }
    // Local balance tested with the CR basis at each m_K^i.
    for (int i = 0; i < n; ++i) {
      const Index f = mesh.elem_facet(k, i);
      const double st = mesh.facet_measure(f) * loc.tau[i];
      trip.push_back({u_idx(k, i), u_idx(k, i), st + vol / n * loc.beta[i]});
      sys.rhs[u_idx(k, i)] += vol / n * loc.f[i];
      const Index dof = space.dof(f);
      if (dof == kNoIndex) {
        sys.rhs[u_idx(k, i)] += st * g[f];
      } else {
        trip.push_back({u_idx(k, i), hat_idx(dof), -st});
      }
    }
    // Flux continuity on free facets, negated.
    for (int i = 0; i < n; ++i) {
      const Index f = mesh.elem_facet(k, i);
      const Index dof = space.dof(f);
      if (dof == kNoIndex) continue;
      const double fm = mesh.facet_measure(f);
      const double st = fm * loc.tau[i];
      for (int r = 0; r < d; ++r) trip.push_back({hat_idx(dof), sigma_idx(k, r), -fm * mesh.facet_normal(k, i)[r]});
      trip.push_back({hat_idx(dof), u_idx(k, i), -st});
      trip.push_back({hat_idx(dof), hat_idx(dof), st});
    }
  }
  sys.matrix = assemble_from_triplets(total, total, std::move(trip));
  return sys;
}

DiffusionSolution recover_local_diffusion(const MeshLevel& mesh, const DiffusionProblem& problem,
                                          std::span<const double> alpha_h, std::vector<double> uhat_facets) {
  const int n = mesh.nodes_per_element();
  DiffusionSolution sol;
  sol.sigma.resize(mesh.num_elements());
  sol.u.resize(mesh.num_elements());
  for (Index k = 0; k < mesh.num_elements(); ++k) {
    const DiffusionLocal loc = diffusion_local(mesh, k, problem, alpha_h[k]);
    std::array<double, 4> vals{};
    for (int i = 0; i < n; ++i) vals[i] = uhat_facets[mesh.elem_facet(k, i)];
    sol.sigma[k] = (-loc.alpha_h) * cr_gradient(mesh, k, std::span<const double>(vals.data(), n));
    for (int i = 0; i < n; ++i) {
      sol.u[k][i] = loc.gamma[i] * (vals[i] + loc.h[i] * loc.h[i] * loc.f[i] / (n * loc.alpha_h));
    }
  }
  sol.uhat = std::move(uhat_facets);
  return sol;
}

DiffusionSolution split_full_diffusion(const FacetSpace& space, const FullHdgSystem& sys, std::span<const double> x,
                                       std::span<const double> boundary) {
  const MeshLevel& mesh = space.mesh();
  const int d = mesh.dim();
  const int n = d + 1;
  DiffusionSolution sol;
  sol.sigma.resize(mesh.num_elements());
  sol.u.resize(mesh.num_elements());
  for (Index k = 0; k < mesh.num_elements(); ++k) {
    Point s{0.0, 0.0, 0.0};
    for (int r = 0; r < d; ++r) s[r] = x[k * d + r];
    sol.sigma[k] = s;
    for (int i = 0; i < n; ++i) sol.u[k][i] = x[sys.n_flux + k * n + i];
  }
  sol.uhat = space.expand(x.subspan(sys.n_flux + sys.n_local, sys.n_hat), boundary);
  return sol;
}

EnergyBalance diffusion_energy(const MeshLevel& mesh, const DiffusionProblem& problem, std::span<const double> alpha_h,
                               const DiffusionSolution& sol) {
  const int n = mesh.nodes_per_element();
  EnergyBalance e;
  for (Index k = 0; k < mesh.num_elements(); ++k) {
    const DiffusionLocal loc = diffusion_local(mesh, k, problem, alpha_h[k]);
    const double vol = mesh.elem_measure(k);
    e.lhs += vol / loc.alpha_h * dot(sol.sigma[k], sol.sigma[k]);
    for (int i = 0; i < n; ++i) {
      const Index f = mesh.elem_facet(k, i);
      const double jump = sol.u[k][i] - sol.uhat[f];
      e.lhs += mesh.facet_measure(f) * loc.tau[i] * jump * jump;
      e.lhs += vol / n * loc.beta[i] * sol.u[k][i] * sol.u[k][i];
      e.rhs += vol / n * loc.f[i] * sol.u[k][i];
    }
  }
  return e;
}

double local_p1_value(const MeshLevel& mesh, Index k, const std::array<double, 4>& values, const Point& x) {
  double v = 0.0;
  for (int i = 0; i < mesh.nodes_per_element(); ++i) v += values[i] * cr_basis_value(mesh, k, i, x);
  return v;
}

DiffusionErrors diffusion_error_norms(const MeshLevel& mesh, const DiffusionSolution& sol, const ScalarField& u_exact,
                                      const VectorField& sigma_exact) {
  double eu = 0.0, es = 0.0;
  for (Index k = 0; k < mesh.num_elements(); ++k) {
    const QuadratureRule rule = error_rule(mesh, k);
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const Point& x = rule.points[q];
      const double du = u_exact(x) - local_p1_value(mesh, k, sol.u[k], x);
      const Point ds = sigma_exact(x) - sol.sigma[k];
      eu += rule.weights[q] * du * du;
      es += rule.weights[q] * dot(ds, ds);
    }
  }
  return {std::sqrt(std::max(eu, 0.0)), std::sqrt(std::max(es, 0.0))};
}

}  // namespace hdg
