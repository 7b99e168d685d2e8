#pragma once

#include <array>
#include <functional>
#include <span>
#include <vector>

#include "hdgmg/linalg.hpp"
#include "hdgmg/quadrature.hpp"
#include "hdgmg/spaces.hpp"

namespace hdg {

using VectorField = std::function<Point(const Point&)>;

/// -div(alpha grad u) + beta u = f with u = g on Dirichlet facets.
struct DiffusionProblem {
  ScalarField alpha;
  ScalarField beta;
  ScalarField f;
  /// Dirichlet data; empty means homogeneous.
  ScalarField dirichlet;
  /// Optional per-element alpha_h overriding the harmonic Q1 average of alpha.
  std::vector<double> alpha_h;
};

/// Per-element alpha_h: the inverse of the Q1 average of 1/alpha, unless overridden.
std::vector<double> element_alpha_h(const MeshLevel& mesh, const DiffusionProblem& problem);

/// Local data at the facet barycenters of one element.
struct DiffusionLocal {
  double alpha_h = 0.0;
  std::array<double, 4> h{};      // |K|/|F_i|
  std::array<double, 4> tau{};    // alpha_h / h_i
  std::array<double, 4> beta{};   // beta(m_K^i)
  std::array<double, 4> f{};      // f(m_K^i)
  std::array<double, 4> gamma{};  // alpha_h / (alpha_h + h_i^2 beta_i / (d+1))
};
DiffusionLocal diffusion_local(const MeshLevel& mesh, Index k, const DiffusionProblem& problem, double alpha_h);

struct CondensedDiffusionSystem {
  CsrMatrix matrix;                // over free facet DOFs
  std::vector<double> rhs;         // includes the Dirichlet lifting
  std::vector<double> alpha_h;     // per element
  std::vector<double> boundary;    // Dirichlet value per facet (zero on free facets)
};

CondensedDiffusionSystem assemble_condensed_diffusion(const FacetSpace& space, const DiffusionProblem& problem);

/// Uncondensed HDG system over (sigma, u, uhat) for verification. Unknown
/// blocks: sigma (dim per element), u (values at the d+1 facet barycenters per
/// element), uhat (free facet DOFs). The facet equations are negated so that
/// eliminating (sigma, u) yields the condensed matrix itself.
struct FullHdgSystem {
  CsrMatrix matrix;
  std::vector<double> rhs;
  Index n_flux = 0;
  Index n_local = 0;
  Index n_hat = 0;
  Index n_pressure = 0;
};

FullHdgSystem assemble_full_hdg_diffusion(const FacetSpace& space, const DiffusionProblem& problem);

struct DiffusionSolution {
  std::vector<Point> sigma;                 // per element
  std::vector<std::array<double, 4>> u;     // per element, at m_K^i
  std::vector<double> uhat;                 // per facet
};

/// Closed-form local recovery from per-facet trace values.
DiffusionSolution recover_local_diffusion(const MeshLevel& mesh, const DiffusionProblem& problem,
                                          std::span<const double> alpha_h, std::vector<double> uhat_facets);

/// Splits a solution vector of the full system into the same layout.
DiffusionSolution split_full_diffusion(const FacetSpace& space, const FullHdgSystem& sys, std::span<const double> x,
                                       std::span<const double> boundary);

struct EnergyBalance {
  double lhs = 0.0;
  double rhs = 0.0;
};

/// sum Q0(alpha_h^-1 |sigma|^2) + Q0_dK(tau (u - uhat)^2) + Q1(beta u^2) against sum Q1(f u).
EnergyBalance diffusion_energy(const MeshLevel& mesh, const DiffusionProblem& problem, std::span<const double> alpha_h,
                               const DiffusionSolution& sol);

/// Value of the discrete P1 function with values u_i at m_K^i, at x in element k.
double local_p1_value(const MeshLevel& mesh, Index k, const std::array<double, 4>& values, const Point& x);

struct DiffusionErrors {
  double u = 0.0;
  double sigma = 0.0;
};

DiffusionErrors diffusion_error_norms(const MeshLevel& mesh, const DiffusionSolution& sol, const ScalarField& u_exact,
                                      const VectorField& sigma_exact);

}  // namespace hdg
