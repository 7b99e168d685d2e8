#include "hdgmg/hdg_stokes.hpp"

#include <cmath>
#include <stdexcept>

namespace hdg {

namespace {

struct StokesLocal {
  std::array<double, 4> h{};
  std::array<double, 4> tau{};
  std::array<double, 4> gamma{};
  std::array<Point, 4> f{};
};

StokesLocal stokes_local(const MeshLevel& mesh, Index k, const StokesProblem& pb) {
  StokesLocal loc;
  const int n = mesh.nodes_per_element();
  for (int i = 0; i < n; ++i) {
    const double h = mesh.h_facet(k, i);
    loc.h[i] = h;
    loc.tau[i] = pb.mu / h;
    loc.gamma[i] = pb.mu / (pb.mu + h * h * pb.beta / n);
    loc.f[i] = pb.f ? pb.f(mesh.facet_barycenter(mesh.elem_facet(k, i))) : Point{0.0, 0.0, 0.0};
  }
  return loc;
}

void check_space(const FacetSpace& vspace) {
  if (vspace.components() != vspace.mesh().dim()) throw std::invalid_argument("Stokes needs a vector facet space");
}

}  // namespace

std::vector<double> vector_boundary_values(const FacetSpace& vspace, const VectorField& g) {
  const MeshLevel& mesh = vspace.mesh();
  const int d = mesh.dim();
  std::vector<double> out(static_cast<std::size_t>(mesh.num_facets()) * d, 0.0);
  if (!g) return out;
  for (Index f = 0; f < mesh.num_facets(); ++f) {
    if (!vspace.is_dirichlet(f)) continue;
    const Point v = g(mesh.facet_barycenter(f));
    for (int c = 0; c < d; ++c) out[static_cast<std::size_t>(f) * d + c] = v[c];
  }
  return out;
}

CsrMatrix assemble_augmented_stokes(const FacetSpace& vspace, const StokesProblem& problem, double epsilon) {
  check_space(vspace);
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
  const MeshLevel& mesh = vspace.mesh();
  const int d = mesh.dim();
  const int n = d + 1;
  std::vector<Triplet> trip;
  trip.reserve(static_cast<std::size_t>(mesh.num_elements()) * n * n * d * d);
  for (Index k = 0; k < mesh.num_elements(); ++k) {
    const StokesLocal loc = stokes_local(mesh, k, problem);
    const double vol = mesh.elem_measure(k);
    std::array<Point, 4> grad{};
    for (int i = 0; i < n; ++i) grad[i] = cr_basis_gradient(mesh, k, i);
    for (int i = 0; i < n; ++i) {
      const Index fi = mesh.elem_facet(k, i);
      if (vspace.is_dirichlet(fi)) continue;
      for (int ci = 0; ci < d; ++ci) {
        const Index row = vspace.dof(fi, ci);
        for (int j = 0; j < n; ++j) {
          const Index fj = mesh.elem_facet(k, j);
          if (vspace.is_dirichlet(fj)) continue;
          const double g = problem.mu * vol * dot(grad[i], grad[j]);
          for (int cj = 0; cj < d; ++cj) {
            double v = vol / epsilon * grad[i][ci] * grad[j][cj];
            if (ci == cj) {
              v += g;
              if (i == j) v += vol / n * loc.gamma[i] * problem.beta;
            }
            trip.push_back({row, vspace.dof(fj, cj), v});
          }
        }
      }
    }
  }
  return assemble_from_triplets(vspace.n_free(), vspace.n_free(), std::move(trip));
}

CondensedStokesSystem assemble_condensed_stokes(const FacetSpace& vspace, const StokesProblem& problem,
                                                double epsilon) {
  check_space(vspace);
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
  const MeshLevel& mesh = vspace.mesh();
  const int d = mesh.dim();
  const int n = d + 1;
  const Index ne = mesh.num_elements();
  CondensedStokesSystem sys;
  sys.epsilon = epsilon;
  sys.boundary = vector_boundary_values(vspace, problem.dirichlet);
  sys.rhs.assign(vspace.n_free(), 0.0);
  sys.div_lift.assign(ne, 0.0);
  sys.weights.resize(ne);
  sys.pressure_mean_zero = true;
  for (Index f = 0; f < mesh.num_facets(); ++f) {
    if (mesh.is_boundary(f) && !vspace.is_dirichlet(f)) sys.pressure_mean_zero = false;
  }
  std::vector<Triplet> ta, td;
  for (Index k = 0; k < ne; ++k) {
    const StokesLocal loc = stokes_local(mesh, k, problem);
    const double vol = mesh.elem_measure(k);
    sys.weights[k] = vol;
    std::array<Point, 4> grad{};
    for (int i = 0; i < n; ++i) grad[i] = cr_basis_gradient(mesh, k, i);
    for (int j = 0; j < n; ++j) {
      const Index fj = mesh.elem_facet(k, j);
      for (int c = 0; c < d; ++c) {
        if (vspace.is_dirichlet(fj)) {
          sys.div_lift[k] += grad[j][c] * sys.boundary[static_cast<std::size_t>(fj) * d + c];
        } else {
          td.push_back({k, vspace.dof(fj, c), grad[j][c]});
        }
      }
    }
    for (int i = 0; i < n; ++i) {
      const Index fi = mesh.elem_facet(k, i);
      if (vspace.is_dirichlet(fi)) continue;
      for (int c = 0; c < d; ++c) {
        const Index row = vspace.dof(fi, c);
        sys.rhs[row] += vol / n * loc.gamma[i] * loc.f[i][c];
        for (int j = 0; j < n; ++j) {
          const Index fj = mesh.elem_facet(k, j);
          double v = problem.mu * vol * dot(grad[i], grad[j]);
          if (i == j) v += vol / n * loc.gamma[i] * problem.beta;
          if (vspace.is_dirichlet(fj)) {
            sys.rhs[row] -= v * sys.boundary[static_cast<std::size_t>(fj) * d + c];
          } else {
            ta.push_back({row, vspace.dof(fj, c), v});
          }
        }
      }
    }
  }
  sys.a = assemble_from_triplets(vspace.n_free(), vspace.n_free(), std::move(ta));
  sys.div = assemble_from_triplets(ne, vspace.n_free(), std::move(td));
  sys.aeps = assemble_augmented_stokes(vspace, problem, epsilon);
  return sys;
}

FullHdgSystem assemble_full_hdg_stokes(const FacetSpace& vspace, const StokesProblem& problem) {
  check_space(vspace);
  const MeshLevel& mesh = vspace.mesh();
  const int d = mesh.dim();
  const int n = d + 1;
  const Index ne = mesh.num_elements();
  FullHdgSystem sys;
  sys.n_flux = ne * d * d;
  sys.n_local = ne * n * d;
  sys.n_hat = vspace.n_free();
  sys.n_pressure = ne;
  const Index total = sys.n_flux + sys.n_local + sys.n_hat + sys.n_pressure;
  sys.rhs.assign(total, 0.0);
  const std::vector<double> g = vector_boundary_values(vspace, problem.dirichlet);
  auto gval = [&](Index f, int c) { return g[static_cast<std::size_t>(f) * d + c]; };
  std::vector<Triplet> trip;

  auto l_idx = [&](Index k, int r, int s) { return (k * d + r) * d + s; };
  auto u_idx = [&](Index k, int i, int c) { return sys.n_flux + (k * n + i) * d + c; };
  auto hat_idx = [&](Index dof) { return sys.n_flux + sys.n_local + dof; };
  auto p_idx = [&](Index k) { return sys.n_flux + sys.n_local + sys.n_hat + k; };

  for (Index k = 0; k < ne; ++k) {
    const StokesLocal loc = stokes_local(mesh, k, problem);
    const double vol = mesh.elem_measure(k);
    for (int r = 0; r < d; ++r) {
      for (int s = 0; s < d; ++s) {
        const Index row = l_idx(k, r, s);
        trip.push_back({row, row, vol / problem.mu});
        for (int i = 0; i < n; ++i) {
          const Index f = mesh.elem_facet(k, i);
          const double c = mesh.facet_measure(f) * mesh.facet_normal(k, i)[s];
          if (vspace.is_dirichlet(f)) {
            sys.rhs[row] -= c * gval(f, r);
          } else {
            trip.push_back({row, hat_idx(vspace.dof(f, r)), c});
          }
        }
      }
    }
    for (int i = 0; i < n; ++i) {
      const Index f = mesh.elem_facet(k, i);
      const double st = mesh.facet_measure(f) * loc.tau[i];
      for (int c = 0; c < d; ++c) {
        const Index row = u_idx(k, i, c);
        trip.push_back({row, row, st + vol / n * problem.beta});
        sys.rhs[row] += vol / n * loc.f[i][c];
        if (vspace.is_dirichlet(f)) {
          sys.rhs[row] += st * gval(f, c);
        } else {
          trip.push_back({row, hat_idx(vspace.dof(f, c)), -st});
        }
      }
    }
    for (int i = 0; i < n; ++i) {
      const Index f = mesh.elem_facet(k, i);
      const double fm = mesh.facet_measure(f);
      const Point& nrm = mesh.facet_normal(k, i);
      if (vspace.is_dirichlet(f)) {
        for (int c = 0; c < d; ++c) sys.rhs[p_idx(k)] += fm * nrm[c] * gval(f, c);
        continue;
      }
      const double st = fm * loc.tau[i];
      for (int c = 0; c < d; ++c) {
        const Index row = hat_idx(vspace.dof(f, c));
        for (int s = 0; s < d; ++s) trip.push_back({row, l_idx(k, c, s), -fm * nrm[s]});
        trip.push_back({row, p_idx(k), -fm * nrm[c]});
        trip.push_back({row, u_idx(k, i, c), -st});
        trip.push_back({row, row, st});
        trip.push_back({p_idx(k), row, -fm * nrm[c]});
      }
    }
  }
  sys.matrix = assemble_from_triplets(total, total, std::move(trip));
  return sys;
}

std::vector<double> uzawa_rhs(const CondensedStokesSystem& sys, std::span<const double> pressure) {
  // rhs + D^T W (p - eps^-1 D_dirichlet g)
  const Index ne = static_cast<Index>(sys.weights.size());
  std::vector<double> elem(ne);
  for (Index k = 0; k < ne; ++k) elem[k] = sys.weights[k] * (pressure[k] - sys.div_lift[k] / sys.epsilon);
  std::vector<double> b(sys.rhs.size());
  sys.div.multiply_transpose(elem, b);
  for (std::size_t i = 0; i < b.size(); ++i) b[i] += sys.rhs[i];
  return b;
}

UzawaResult uzawa_solve(const CondensedStokesSystem& sys, const InnerSolver& inner, int k_max) {
  if (k_max < 1) throw std::invalid_argument("at least one Uzawa step is required");
  const Index ne = static_cast<Index>(sys.weights.size());
  UzawaResult res;
  res.pressure.assign(ne, 0.0);
  res.velocity.assign(sys.rhs.size(), 0.0);
  std::vector<double> div(ne);
  for (int k = 0; k < k_max; ++k) {
    const std::vector<double> b = uzawa_rhs(sys, res.pressure);
    KrylovReport rep = inner(b, res.velocity);
    const SolveStatus st = rep.status;
    res.steps.push_back(std::move(rep));
    if (st != SolveStatus::Converged) {
      res.status = st;
      return res;
    }
    sys.div.multiply(res.velocity, div);
    for (Index e = 0; e < ne; ++e) res.pressure[e] -= (div[e] + sys.div_lift[e]) / sys.epsilon;
    if (sys.pressure_mean_zero) {
      double num = 0.0, den = 0.0;
      for (Index e = 0; e < ne; ++e) {
        num += sys.weights[e] * res.pressure[e];
        den += sys.weights[e];
      }
      for (double& p : res.pressure) p -= num / den;
    }
  }
  return res;
}

StokesSolution recover_local_stokes(const MeshLevel& mesh, const StokesProblem& problem,
                                    std::vector<double> uhat_facets, std::vector<double> pressure) {
  const int d = mesh.dim();
  const int n = d + 1;
  StokesSolution sol;
  sol.grad.assign(mesh.num_elements(), {});
  sol.u.assign(mesh.num_elements(), {});
  for (Index k = 0; k < mesh.num_elements(); ++k) {
    const StokesLocal loc = stokes_local(mesh, k, problem);
    for (int i = 0; i < n; ++i) {
      const Index f = mesh.elem_facet(k, i);
      const Point g = cr_basis_gradient(mesh, k, i);
      for (int c = 0; c < d; ++c) {
        const double v = uhat_facets[static_cast<std::size_t>(f) * d + c];
        for (int s = 0; s < d; ++s) sol.grad[k][c * d + s] -= problem.mu * v * g[s];
        sol.u[k][i * d + c] = loc.gamma[i] * (v + loc.h[i] * loc.h[i] * loc.f[i][c] / (n * problem.mu));
      }
    }
  }
  sol.uhat = std::move(uhat_facets);
  sol.p = std::move(pressure);
  return sol;
}

StokesSolution split_full_stokes(const FacetSpace& vspace, const FullHdgSystem& sys, std::span<const double> x,
                                 std::span<const double> boundary) {
  const MeshLevel& mesh = vspace.mesh();
  const int d = mesh.dim();
  const int n = d + 1;
  const Index ne = mesh.num_elements();
  StokesSolution sol;
  sol.grad.assign(ne, {});
  sol.u.assign(ne, {});
  sol.p.assign(ne, 0.0);
  for (Index k = 0; k < ne; ++k) {
    for (int q = 0; q < d * d; ++q) sol.grad[k][q] = x[k * d * d + q];
    for (int q = 0; q < n * d; ++q) sol.u[k][q] = x[sys.n_flux + k * n * d + q];
    sol.p[k] = x[sys.n_flux + sys.n_local + sys.n_hat + k];
  }
  sol.uhat = vspace.expand(x.subspan(sys.n_flux + sys.n_local, sys.n_hat), boundary);
  return sol;
}

EnergyBalance stokes_energy(const MeshLevel& mesh, const StokesProblem& problem, const StokesSolution& sol) {
  const int d = mesh.dim();
  const int n = d + 1;
  EnergyBalance e;
  for (Index k = 0; k < mesh.num_elements(); ++k) {
    const StokesLocal loc = stokes_local(mesh, k, problem);
    const double vol = mesh.elem_measure(k);
    for (int q = 0; q < d * d; ++q) e.lhs += vol / problem.mu * sol.grad[k][q] * sol.grad[k][q];
    for (int i = 0; i < n; ++i) {
      const Index f = mesh.elem_facet(k, i);
      for (int c = 0; c < d; ++c) {
        const double u = sol.u[k][i * d + c];
        const double jump = u - sol.uhat[static_cast<std::size_t>(f) * d + c];
        e.lhs += mesh.facet_measure(f) * loc.tau[i] * jump * jump;
        e.lhs += vol / n * problem.beta * u * u;
        e.rhs += vol / n * loc.f[i][c] * u;
      }
    }
  }
  return e;
}

StokesErrors stokes_error_norms(const MeshLevel& mesh, const StokesSolution& sol, const VectorField& u_exact,
                                const TensorField& l_exact) {
  const int d = mesh.dim();
  const int n = d + 1;
  double eu = 0.0, ediv = 0.0, el = 0.0;
  for (Index k = 0; k < mesh.num_elements(); ++k) {
    std::array<Point, 4> grad{};
    for (int i = 0; i < n; ++i) grad[i] = cr_basis_gradient(mesh, k, i);
    double div = 0.0;
    for (int i = 0; i < n; ++i) {
      for (int c = 0; c < d; ++c) div += sol.u[k][i * d + c] * grad[i][c];
    }
    ediv += mesh.elem_measure(k) * div * div;
    const QuadratureRule rule = error_rule(mesh, k);
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const Point& x = rule.points[q];
      const Point ue = u_exact(x);
      const std::array<double, 9> le = l_exact(x);
      for (int c = 0; c < d; ++c) {
        double uh = 0.0;
        for (int i = 0; i < n; ++i) uh += sol.u[k][i * d + c] * cr_basis_value(mesh, k, i, x);
        eu += rule.weights[q] * (ue[c] - uh) * (ue[c] - uh);
      }
      for (int r = 0; r < d * d; ++r) {
        const double dl = le[r] - sol.grad[k][r];
        el += rule.weights[q] * dl * dl;
      }
    }
  }
  return {std::sqrt(std::max(eu, 0.0)), std::sqrt(std::max(ediv, 0.0)), std::sqrt(std::max(el, 0.0))};
}

}  // namespace hdg
