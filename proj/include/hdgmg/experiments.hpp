#pragma once

#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string_view>
#include <vector>

#include "hdgmg/hdg_diffusion.hpp"
#include "hdgmg/hdg_stokes.hpp"
#include "hdgmg/multigrid.hpp"

namespace hdg {

enum class SolveMode { Solver, Preconditioner };
enum class Domain { UnitBox, Step };
enum class DiffusionScenario { Smooth, Chessboard };
enum class StokesScenario { Manufactured, LidDriven, BackwardStep };
/// How the chessboard coefficient is carried to coarser levels.
enum class CoarseAverage { InverseMean, Mean };

SolveMode parse_mode(std::string_view name);

struct ExperimentConfig {
  int dim = 2;
  int levels = 5;
  /// First level reported by multigrid studies (level 1 is the coarsest mesh).
  int min_level = 1;
  /// Cells per axis of the coarsest structured mesh; 0 derives it from coarse_h.
  int coarse_cells = 0;
  double coarse_h = 0.25;
  CycleConfig cycle;
  SolveMode mode = SolveMode::Preconditioner;
  DiffusionScenario diffusion = DiffusionScenario::Smooth;
  StokesScenario stokes = StokesScenario::Manufactured;
  double mu = 1.0;
  double beta = 10.0;
  double rho = 1.0;
  CoarseAverage coarse_average = CoarseAverage::Mean;
  double epsilon = 1e-8;
  int uzawa_steps = 1;
  double tol = 1e-8;
  int max_iter = 500;
  StoppingNorm stop = StoppingNorm::Euclidean;
};

struct LevelReport {
  int level = 0;
  Index dofs = 0;
  SolveStatus status = SolveStatus::Converged;
  int iterations = 0;
  std::optional<double> kappa;
  std::optional<double> err_u, eoc_u;
  std::optional<double> err_flux, eoc_flux;
  std::optional<double> err_div, eoc_div;
  double seconds = 0.0;
};

std::vector<LevelReport> run_converge_diffusion(const ExperimentConfig& cfg);
std::vector<LevelReport> run_converge_stokes(const ExperimentConfig& cfg);
std::vector<LevelReport> run_mg_diffusion(const ExperimentConfig& cfg);
std::vector<LevelReport> run_mg_stokes(const ExperimentConfig& cfg);

/// Header `level,dofs,iters,kappa,err_u,eoc_u,err_flux,eoc_flux[,err_div,eoc_div]`.
void write_csv(std::ostream& out, const std::vector<LevelReport>& rows, bool with_div);

// Building blocks shared with the tests.

struct ManufacturedDiffusion {
  DiffusionProblem problem;
  ScalarField u;
  VectorField sigma;
};
/// alpha = beta = 1 + sin(x)sin(y)[sin(z)]/2 and u = prod (t - t^2), homogeneous Dirichlet.
ManufacturedDiffusion manufactured_diffusion(int dim);

struct ManufacturedStokes {
  StokesProblem problem;
  VectorField u;
  TensorField grad;  // L = -mu grad u
  ScalarField p;
};
ManufacturedStokes manufactured_stokes(int dim, double mu, double beta);

StokesProblem lid_driven_problem(int dim, double mu, double beta);
StokesProblem backward_step_problem(int dim, double mu, double beta);

MeshLevel coarse_mesh(const ExperimentConfig& cfg, Domain domain);

/// Dirichlet everywhere except the outflow plane x = 5 of the step domain.
FacetSpace::FacetPredicate step_dirichlet(const MeshLevel& mesh);

/// Per-level alpha_h of the chessboard with `levels` levels, coarsest first.
std::vector<std::vector<double>> chessboard_alpha(const MeshHierarchy& h, int levels, int finest_cells, double rho,
                                                  CoarseAverage avg);

/// Owns the spaces, level operators and multigrid of one solve.
struct DiffusionMgRun {
  std::vector<std::unique_ptr<FacetSpace>> spaces;
  std::vector<double> alpha_h;  // finest level
  std::vector<double> rhs;
  std::vector<double> boundary;
  std::unique_ptr<Multigrid> mg;
};

/// Builds a diffusion hierarchy on levels 0..top; `problem_at(l)` gives the level-l problem.
DiffusionMgRun build_diffusion_mg(const MeshHierarchy& h, int top,
                                  const std::function<DiffusionProblem(int)>& problem_at, const CycleConfig& cycle);

struct StokesMgRun {
  std::vector<std::unique_ptr<FacetSpace>> spaces;
  CondensedStokesSystem system;  // finest; its aeps is moved into the multigrid
  std::unique_ptr<Multigrid> mg;
};

StokesMgRun build_stokes_mg(const MeshHierarchy& h, int top, const StokesProblem& problem, double epsilon,
                            const CycleConfig& cycle,
                            const std::function<FacetSpace::FacetPredicate(const MeshLevel&)>& dirichlet);

struct SolveOutcome {
  KrylovReport report;
  std::optional<double> kappa;
};

/// Stationary cycles or PCG with one cycle as preconditioner.
SolveOutcome solve_with_mg(const Multigrid& mg, std::span<const double> b, std::span<double> x, SolveMode mode,
                           double tol, int max_iter, StoppingNorm stop = StoppingNorm::Euclidean);

}  // namespace hdg
