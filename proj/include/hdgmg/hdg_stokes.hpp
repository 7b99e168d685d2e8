#pragma once

#include <array>
#include <functional>
#include <span>
#include <vector>

#include "hdgmg/hdg_diffusion.hpp"
#include "hdgmg/krylov.hpp"

namespace hdg {

using TensorField = std::function<std::array<double, 9>(const Point&)>;  // row-major d x d in a 3x3 slot

/// -mu Laplace u + beta u + grad p = f, div u = 0, u = g on Dirichlet facets,
/// zero traction elsewhere.
struct StokesProblem {
  double mu = 1.0;
  double beta = 0.0;
  VectorField f;
  /// Dirichlet data; empty means homogeneous.
  VectorField dirichlet;
};

/// Condensed velocity system and the pieces of the augmented operator.
///
/// The divergence matrix holds unscaled element divergences of the CR
/// velocity, D[K, dof] = |F_i| n_i[c] / |K|, and W = diag(|K|), so that
/// aeps = A + eps^-1 D^T W D.
struct CondensedStokesSystem {
  CsrMatrix a;
  CsrMatrix div;
  CsrMatrix aeps;
  std::vector<double> weights;
  std::vector<double> rhs;        // load minus A times the Dirichlet lifting
  std::vector<double> div_lift;   // per element divergence of the Dirichlet lifting
  std::vector<double> boundary;   // per facet, component-major; zero on free facets
  double epsilon = 1e-8;
  /// True when every boundary facet is Dirichlet, so pressure is fixed up to a constant.
  bool pressure_mean_zero = true;
};

CondensedStokesSystem assemble_condensed_stokes(const FacetSpace& vspace, const StokesProblem& problem,
                                                double epsilon = 1e-8);

/// Augmented velocity block A + eps^-1 D^T W D assembled element by element.
CsrMatrix assemble_augmented_stokes(const FacetSpace& vspace, const StokesProblem& problem, double epsilon);

/// Uncondensed system over (L, u, uhat, p); facet and pressure equations negated.
FullHdgSystem assemble_full_hdg_stokes(const FacetSpace& vspace, const StokesProblem& problem);

/// Solves aeps x = rhs; returns the solver report.
using InnerSolver = std::function<KrylovReport(std::span<const double> rhs, std::span<double> x)>;

struct UzawaResult {
  std::vector<double> velocity;  // free DOFs
  std::vector<double> pressure;  // per element
  std::vector<KrylovReport> steps;
  SolveStatus status = SolveStatus::Converged;
};

/// Augmented Lagrangian Uzawa iteration starting from p = 0.
UzawaResult uzawa_solve(const CondensedStokesSystem& sys, const InnerSolver& inner, int k_max = 1);

/// Right-hand side of the augmented velocity solve for a given pressure.
std::vector<double> uzawa_rhs(const CondensedStokesSystem& sys, std::span<const double> pressure);

struct StokesSolution {
  std::vector<std::array<double, 9>> grad;    // L_h per element, row-major d x d
  std::vector<std::array<double, 12>> u;      // per element, index i*d + c
  std::vector<double> uhat;                   // per facet, component-major
  std::vector<double> p;                      // per element
};

StokesSolution recover_local_stokes(const MeshLevel& mesh, const StokesProblem& problem,
                                    std::vector<double> uhat_facets, std::vector<double> pressure);

StokesSolution split_full_stokes(const FacetSpace& vspace, const FullHdgSystem& sys, std::span<const double> x,
                                 std::span<const double> boundary);

EnergyBalance stokes_energy(const MeshLevel& mesh, const StokesProblem& problem, const StokesSolution& sol);

struct StokesErrors {
  double u = 0.0;
  double div = 0.0;
  double grad = 0.0;
};

StokesErrors stokes_error_norms(const MeshLevel& mesh, const StokesSolution& sol, const VectorField& u_exact,
                                const TensorField& l_exact);

/// Per-facet Dirichlet values of a vector field (zero on free facets).
std::vector<double> vector_boundary_values(const FacetSpace& vspace, const VectorField& g);

}  // namespace hdg
