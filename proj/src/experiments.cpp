#include "hdgmg/experiments.hpp"

#include <chrono>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace hdg {

SolveMode parse_mode(std::string_view name) {
  if (name == "solver") return SolveMode::Solver;
  if (name == "precond") return SolveMode::Preconditioner;
  throw std::invalid_argument("unknown mode '" + std::string(name) + "'");
}

namespace {

// t^2 (t-1)^2 and its derivatives.
double bump(int order, double t) {
  switch (order) {
    case 0:
      return t * t * (t - 1.0) * (t - 1.0);
    case 1:
      return 4 * t * t * t - 6 * t * t + 2 * t;
    case 2:
      return 12 * t * t - 12 * t + 2;
    case 3:
      return 24 * t - 12;
    case 4:
      return 24.0;
    default:
      return 0.0;
  }
}

// t - t^2 and its derivatives.
double quad(int order, double t) {
  switch (order) {
    case 0:
      return t - t * t;
    case 1:
      return 1.0 - 2.0 * t;
    case 2:
      return -2.0;
    default:
      return 0.0;
  }
}

void validate(const ExperimentConfig& cfg) {
  if (cfg.dim != 2 && cfg.dim != 3) throw std::invalid_argument("dim must be 2 or 3");
  if (cfg.levels < 1) throw std::invalid_argument("levels must be at least 1");
  if (cfg.min_level < 1 || cfg.min_level > cfg.levels) throw std::invalid_argument("min_level out of range");
  if (cfg.cycle.steps < 1) throw std::invalid_argument("steps must be positive");
  if (!(cfg.tol > 0.0) || cfg.max_iter < 1) throw std::invalid_argument("invalid solver tolerance settings");
  if (!(cfg.epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
  if (!(cfg.mu > 0.0) || cfg.beta < 0.0) throw std::invalid_argument("need mu > 0 and beta >= 0");
  if (cfg.uzawa_steps < 1) throw std::invalid_argument("uzawa steps must be positive");
  if (!(cfg.rho > 0.0)) throw std::invalid_argument("rho must be positive");
}

int coarse_cells_of(const ExperimentConfig& cfg) {
  if (cfg.coarse_cells > 0) return cfg.coarse_cells;
  return std::max(1, static_cast<int>(std::ceil(std::sqrt(double(cfg.dim)) / cfg.coarse_h - 1e-12)));
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::optional<double> eoc(const std::optional<double>& prev, const std::optional<double>& cur) {
  if (!prev || !cur || !(*prev > 0.0) || !(*cur > 0.0)) return std::nullopt;
  return std::log2(*prev / *cur);
}

void fill_eocs(std::vector<LevelReport>& rows) {
  for (std::size_t i = 1; i < rows.size(); ++i) {
    rows[i].eoc_u = eoc(rows[i - 1].err_u, rows[i].err_u);
    rows[i].eoc_flux = eoc(rows[i - 1].err_flux, rows[i].err_flux);
    rows[i].eoc_div = eoc(rows[i - 1].err_div, rows[i].err_div);
  }
}

FacetSpace::FacetPredicate all_dirichlet_for(const MeshLevel&) { return all_boundary_dirichlet(); }

}  // namespace

ManufacturedDiffusion manufactured_diffusion(int dim) {
  if (dim != 2 && dim != 3) throw std::invalid_argument("dim must be 2 or 3");
  ManufacturedDiffusion m;
  auto u = [dim](const Point& x) {
    double v = 1.0;
    for (int j = 0; j < dim; ++j) v *= quad(0, x[j]);
    return v;
  };
  auto grad_u = [dim](const Point& x) {
    Point g{0.0, 0.0, 0.0};
    for (int s = 0; s < dim; ++s) {
      double v = 1.0;
      for (int j = 0; j < dim; ++j) v *= quad(j == s ? 1 : 0, x[j]);
      g[s] = v;
    }
    return g;
  };
  auto lap_u = [dim](const Point& x) {
    double sum = 0.0;
    for (int s = 0; s < dim; ++s) {
      double v = 1.0;
      for (int j = 0; j < dim; ++j) v *= quad(j == s ? 2 : 0, x[j]);
      sum += v;
    }
    return sum;
  };
  auto alpha = [dim](const Point& x) {
    double v = 0.5;
    for (int j = 0; j < dim; ++j) v *= std::sin(x[j]);
    return 1.0 + v;
  };
  auto grad_alpha = [dim](const Point& x) {
    Point g{0.0, 0.0, 0.0};
    for (int s = 0; s < dim; ++s) {
      double v = 0.5;
      for (int j = 0; j < dim; ++j) v *= j == s ? std::cos(x[j]) : std::sin(x[j]);
      g[s] = v;
    }
    return g;
  };
  m.problem.alpha = alpha;
  m.problem.beta = alpha;
  m.problem.f = [=](const Point& x) {
    return -(alpha(x) * lap_u(x) + dot(grad_alpha(x), grad_u(x))) + alpha(x) * u(x);
  };
  m.u = u;
  m.sigma = [=](const Point& x) { return (-alpha(x)) * grad_u(x); };
  return m;
}

ManufacturedStokes manufactured_stokes(int dim, double mu, double beta) {
  if (dim != 2 && dim != 3) throw std::invalid_argument("dim must be 2 or 3");
  // u_c = coef_c * prod_j bump^(order_cj)(x_j), divergence free by construction.
  struct Component {
    double coef;
    std::array<int, 3> order;
  };
  std::vector<Component> comps;
  if (dim == 2) {
    comps = {{-1.0, {0, 1, 0}}, {1.0, {1, 0, 0}}};
  } else {
    comps = {{1.0, {0, 1, 1}}, {1.0, {1, 0, 1}}, {-2.0, {1, 1, 0}}};
  }
  auto term = [dim](const Component& c, const Point& x, int s, int extra) {
    double v = c.coef;
    for (int j = 0; j < dim; ++j) v *= bump(c.order[j] + (j == s ? extra : 0), x[j]);
    return v;
  };
  auto u = [=](const Point& x) {
    Point v{0.0, 0.0, 0.0};
    for (int c = 0; c < dim; ++c) v[c] = term(comps[c], x, 0, 0);
    return v;
  };
  auto grad_p = [dim](const Point& x) {
    if (dim == 2) return Point{(1 - 2 * x[0]) * (1 - x[1]), -x[0] * (1 - x[0]), 0.0};
    return Point{(1 - 2 * x[0]) * (1 - x[1]) * (1 - x[2]), -x[0] * (1 - x[0]) * (1 - x[2]),
                 -x[0] * (1 - x[0]) * (1 - x[1])};
  };
  ManufacturedStokes m;
  m.problem.mu = mu;
  m.problem.beta = beta;
  m.problem.f = [=](const Point& x) {
    Point f = grad_p(x);
    for (int c = 0; c < dim; ++c) {
      double lap = 0.0;
      for (int s = 0; s < dim; ++s) lap += term(comps[c], x, s, 2);
      f[c] += -mu * lap + beta * term(comps[c], x, 0, 0);
    }
    return f;
  };
  m.u = u;
  m.grad = [=](const Point& x) {
    std::array<double, 9> l{};
    for (int c = 0; c < dim; ++c) {
      for (int s = 0; s < dim; ++s) l[c * dim + s] = -mu * term(comps[c], x, s, 1);
    }
    return l;
  };
  m.p = [dim](const Point& x) {
    if (dim == 2) return x[0] * (1 - x[0]) * (1 - x[1]) - 1.0 / 12.0;
    return x[0] * (1 - x[0]) * (1 - x[1]) * (1 - x[2]) - 1.0 / 24.0;
  };
  return m;
}

StokesProblem lid_driven_problem(int dim, double mu, double beta) {
  StokesProblem pb;
  pb.mu = mu;
  pb.beta = beta;
  pb.f = [](const Point&) { return Point{0.0, 0.0, 0.0}; };
  pb.dirichlet = [dim](const Point& x) {
    if (dim == 2) {
      if (std::abs(x[1] - 1.0) < 1e-12) return Point{4 * x[0] * (1 - x[0]), 0.0, 0.0};
    } else if (std::abs(x[2] - 1.0) < 1e-12) {
      return Point{16 * x[0] * (1 - x[0]) * x[1] * (1 - x[1]), 0.0, 0.0};
    }
    return Point{0.0, 0.0, 0.0};
  };
  return pb;
}

StokesProblem backward_step_problem(int dim, double mu, double beta) {
  StokesProblem pb;
  pb.mu = mu;
  pb.beta = beta;
  pb.f = [](const Point&) { return Point{0.0, 0.0, 0.0}; };
  pb.dirichlet = [dim](const Point& x) {
    if (std::abs(x[0]) < 1e-12) {
      double v = 16 * (1 - x[1]) * (x[1] - 0.5);
      if (dim == 3) v *= 4 * x[2] * (1 - x[2]);
      return Point{v, 0.0, 0.0};
    }
    return Point{0.0, 0.0, 0.0};
  };
  return pb;
}

MeshLevel coarse_mesh(const ExperimentConfig& cfg, Domain domain) {
  const int cells = coarse_cells_of(cfg);
  if (domain == Domain::UnitBox) return build_unit_box_mesh_cells(cfg.dim, cells);
  const double h = cfg.coarse_cells > 0 ? 0.5 * std::sqrt(double(cfg.dim)) / cfg.coarse_cells : cfg.coarse_h;
  return build_step_domain_mesh(cfg.dim, h);
}

FacetSpace::FacetPredicate step_dirichlet(const MeshLevel& mesh) {
  const MeshLevel* m = &mesh;
  return [m](Index f) { return std::abs(m->facet_barycenter(f)[0] - 5.0) > 1e-12; };
}

std::vector<std::vector<double>> chessboard_alpha(const MeshHierarchy& h, int levels, int finest_cells, double rho,
                                                  CoarseAverage avg) {
  std::vector<std::vector<double>> alpha(levels);
  const MeshLevel& fine = h.level(levels - 1);
  alpha[levels - 1].resize(fine.num_elements());
  for (Index k = 0; k < fine.num_elements(); ++k) {
    const Point& c = fine.elem_barycenter(k);
    const long parity = static_cast<long>(std::floor(c[0] * finest_cells)) + static_cast<long>(std::floor(c[1] * finest_cells));
    alpha[levels - 1][k] = parity % 2 == 0 ? 1.0 : rho;
  }
  for (int l = levels - 2; l >= 0; --l) {
    const RefinementMaps& maps = h.maps(l + 1);
    alpha[l].resize(h.level(l).num_elements());
    for (Index k = 0; k < h.level(l).num_elements(); ++k) {
      // Children have equal measure, so the projection is a plain mean.
      double s = 0.0;
      for (Index child : maps.child_elems[k]) {
        s += avg == CoarseAverage::InverseMean ? 1.0 / alpha[l + 1][child] : alpha[l + 1][child];
      }
      s /= maps.child_elems[k].size();
      alpha[l][k] = avg == CoarseAverage::InverseMean ? 1.0 / s : s;
    }
  }
  return alpha;
}

DiffusionMgRun build_diffusion_mg(const MeshHierarchy& h, int top,
                                  const std::function<DiffusionProblem(int)>& problem_at, const CycleConfig& cycle) {
  DiffusionMgRun run;
  std::vector<MgLevelInput> inputs;
  for (int l = 0; l <= top; ++l) {
    run.spaces.push_back(std::make_unique<FacetSpace>(h.level(l), 1, all_boundary_dirichlet()));
    CondensedDiffusionSystem sys = assemble_condensed_diffusion(*run.spaces[l], problem_at(l));
    MgLevelInput in;
    in.matrix = std::move(sys.matrix);
    in.space = run.spaces[l].get();
    if (l > 0) in.prolongation = build_prolongation(*run.spaces[l - 1], *run.spaces[l], h.maps(l));
    if (l == top) {
      run.rhs = std::move(sys.rhs);
      run.alpha_h = std::move(sys.alpha_h);
      run.boundary = std::move(sys.boundary);
    }
    inputs.push_back(std::move(in));
  }
  run.mg = std::make_unique<Multigrid>(std::move(inputs), cycle);
  return run;
}

StokesMgRun build_stokes_mg(const MeshHierarchy& h, int top, const StokesProblem& problem, double epsilon,
                            const CycleConfig& cycle,
                            const std::function<FacetSpace::FacetPredicate(const MeshLevel&)>& dirichlet) {
  StokesMgRun run;
  std::vector<MgLevelInput> inputs;
  for (int l = 0; l <= top; ++l) {
    const MeshLevel& mesh = h.level(l);
    run.spaces.push_back(std::make_unique<FacetSpace>(mesh, mesh.dim(), dirichlet(mesh)));
    MgLevelInput in;
    if (l == top) {
      run.system = assemble_condensed_stokes(*run.spaces[l], problem, epsilon);
      in.matrix = std::move(run.system.aeps);
      run.system.aeps = CsrMatrix();
    } else {
      in.matrix = assemble_augmented_stokes(*run.spaces[l], problem, epsilon);
    }
    in.space = run.spaces[l].get();
    if (l > 0) {
      in.prolongation = build_prolongation(*run.spaces[l - 1], *run.spaces[l], h.maps(l));
      in.bubbles = build_bubble_index(*run.spaces[l], h.maps(l), h.level(l - 1).num_elements());
    }
    inputs.push_back(std::move(in));
  }
  run.mg = std::make_unique<Multigrid>(std::move(inputs), cycle);
  return run;
}

SolveOutcome solve_with_mg(const Multigrid& mg, std::span<const double> b, std::span<double> x, SolveMode mode,
                           double tol, int max_iter, StoppingNorm stop) {
  SolveOutcome out;
  if (mode == SolveMode::Solver) {
    out.report = mg.solve(b, x, tol, max_iter);
    return out;
  }
  out.report = pcg(as_operator(mg.finest_matrix()), b, x, mg.preconditioner(), tol, max_iter, stop);
  if (out.report.status != SolveStatus::Indefinite && out.report.lanczos_diag.size() >= 2) {
    try {
      out.kappa = estimate_condition_number(out.report.lanczos_diag, out.report.lanczos_offdiag);
    } catch (const std::invalid_argument&) {
      out.kappa.reset();
    }
  } else if (out.report.status == SolveStatus::Converged && out.report.iterations <= 1) {
    out.kappa = 1.0;
  }
  return out;
}

std::vector<LevelReport> run_converge_diffusion(const ExperimentConfig& cfg) {
  validate(cfg);
  const ManufacturedDiffusion man = manufactured_diffusion(cfg.dim);
  const MeshHierarchy h(coarse_mesh(cfg, Domain::UnitBox), cfg.levels);
  std::vector<LevelReport> rows;
  for (int top = 0; top < cfg.levels; ++top) {
    const auto t0 = std::chrono::steady_clock::now();
    DiffusionMgRun run = build_diffusion_mg(h, top, [&](int) { return man.problem; }, cfg.cycle);
    std::vector<double> x(run.rhs.size(), 0.0);
    const SolveOutcome sol = solve_with_mg(*run.mg, run.rhs, x, cfg.mode, cfg.tol, cfg.max_iter, cfg.stop);
    LevelReport row;
    row.level = top + 1;
    row.dofs = run.spaces[top]->n_free();
    row.status = sol.report.status;
    row.iterations = sol.report.iterations;
    row.kappa = sol.kappa;
    if (sol.report.status == SolveStatus::Converged) {
      const DiffusionSolution ds =
          recover_local_diffusion(h.level(top), man.problem, run.alpha_h, run.spaces[top]->expand(x, run.boundary));
      const DiffusionErrors e = diffusion_error_norms(h.level(top), ds, man.u, man.sigma);
      row.err_u = e.u;
      row.err_flux = e.sigma;
    }
    row.seconds = seconds_since(t0);
    rows.push_back(row);
  }
  fill_eocs(rows);
  return rows;
}

std::vector<LevelReport> run_converge_stokes(const ExperimentConfig& cfg) {
  validate(cfg);
  const ManufacturedStokes man = manufactured_stokes(cfg.dim, cfg.mu, cfg.beta);
  const MeshHierarchy h(coarse_mesh(cfg, Domain::UnitBox), cfg.levels);
  std::vector<LevelReport> rows;
  for (int top = 0; top < cfg.levels; ++top) {
    const auto t0 = std::chrono::steady_clock::now();
    StokesMgRun run = build_stokes_mg(h, top, man.problem, cfg.epsilon, cfg.cycle, all_dirichlet_for);
    std::optional<double> kappa;
    const InnerSolver inner = [&](std::span<const double> b, std::span<double> x) {
      SolveOutcome o = solve_with_mg(*run.mg, b, x, cfg.mode, cfg.tol, cfg.max_iter, cfg.stop);
      if (!kappa) kappa = o.kappa;
      return o.report;
    };
    const UzawaResult uz = uzawa_solve(run.system, inner, cfg.uzawa_steps);
    LevelReport row;
    row.level = top + 1;
    row.dofs = run.spaces[top]->n_free();
    row.status = uz.status;
    row.iterations = uz.steps.empty() ? 0 : uz.steps.front().iterations;
    row.kappa = kappa;
    if (uz.status == SolveStatus::Converged) {
      const StokesSolution ss = recover_local_stokes(h.level(top), man.problem,
                                                     run.spaces[top]->expand(uz.velocity, run.system.boundary),
                                                     uz.pressure);
      const StokesErrors e = stokes_error_norms(h.level(top), ss, man.u, man.grad);
      row.err_u = e.u;
      row.err_flux = e.grad;
      row.err_div = e.div;
    }
    row.seconds = seconds_since(t0);
    rows.push_back(row);
  }
  fill_eocs(rows);
  return rows;
}

std::vector<LevelReport> run_mg_diffusion(const ExperimentConfig& cfg) {
  validate(cfg);
  if (cfg.diffusion == DiffusionScenario::Chessboard && cfg.dim != 2) {
    throw std::invalid_argument("the chessboard scenario is two-dimensional");
  }
  const int cells = coarse_cells_of(cfg);
  const MeshHierarchy h(coarse_mesh(cfg, Domain::UnitBox), cfg.levels);
  const ManufacturedDiffusion man = manufactured_diffusion(cfg.dim);
  std::vector<LevelReport> rows;
  for (int top = cfg.min_level - 1; top < cfg.levels; ++top) {
    const auto t0 = std::chrono::steady_clock::now();
    std::function<DiffusionProblem(int)> problem_at;
    if (cfg.diffusion == DiffusionScenario::Smooth) {
      problem_at = [&](int) { return man.problem; };
    } else {
      auto alpha = std::make_shared<std::vector<std::vector<double>>>(
          chessboard_alpha(h, top + 1, cells << top, cfg.rho, cfg.coarse_average));
      problem_at = [alpha](int l) {
        DiffusionProblem pb;
        pb.beta = [](const Point&) { return 1.0; };
        pb.f = [](const Point&) { return 1.0; };
        pb.alpha_h = (*alpha)[l];
        return pb;
      };
    }
    DiffusionMgRun run = build_diffusion_mg(h, top, problem_at, cfg.cycle);
    std::vector<double> x(run.rhs.size(), 0.0);
    const SolveOutcome sol = solve_with_mg(*run.mg, run.rhs, x, cfg.mode, cfg.tol, cfg.max_iter, cfg.stop);
    LevelReport row;
    row.level = top + 1;
    row.dofs = run.spaces[top]->n_free();
    row.status = sol.report.status;
    row.iterations = sol.report.iterations;
    row.kappa = sol.kappa;
    row.seconds = seconds_since(t0);
    rows.push_back(row);
  }
  return rows;
}

std::vector<LevelReport> run_mg_stokes(const ExperimentConfig& cfg) {
  validate(cfg);
  const bool step = cfg.stokes == StokesScenario::BackwardStep;
  const MeshHierarchy h(coarse_mesh(cfg, step ? Domain::Step : Domain::UnitBox), cfg.levels);
  StokesProblem problem;
  switch (cfg.stokes) {
    case StokesScenario::Manufactured:
      problem = manufactured_stokes(cfg.dim, cfg.mu, cfg.beta).problem;
      break;
    case StokesScenario::LidDriven:
      problem = lid_driven_problem(cfg.dim, cfg.mu, cfg.beta);
      break;
    case StokesScenario::BackwardStep:
      problem = backward_step_problem(cfg.dim, cfg.mu, cfg.beta);
      break;
  }
  std::function<FacetSpace::FacetPredicate(const MeshLevel&)> dirichlet = all_dirichlet_for;
  if (step) dirichlet = step_dirichlet;
  std::vector<LevelReport> rows;
  for (int top = cfg.min_level - 1; top < cfg.levels; ++top) {
    const auto t0 = std::chrono::steady_clock::now();
    StokesMgRun run = build_stokes_mg(h, top, problem, cfg.epsilon, cfg.cycle, dirichlet);
    const std::vector<double> b = uzawa_rhs(run.system, std::vector<double>(h.level(top).num_elements(), 0.0));
    std::vector<double> x(b.size(), 0.0);
    const SolveOutcome sol = solve_with_mg(*run.mg, b, x, cfg.mode, cfg.tol, cfg.max_iter, cfg.stop);
    LevelReport row;
    row.level = top + 1;
    row.dofs = run.spaces[top]->n_free();
    row.status = sol.report.status;
    row.iterations = sol.report.iterations;
    row.kappa = sol.kappa;
    row.seconds = seconds_since(t0);
    rows.push_back(row);
  }
  return rows;
}

void write_csv(std::ostream& out, const std::vector<LevelReport>& rows, bool with_div) {
  out << "level,dofs,iters,kappa,err_u,eoc_u,err_flux,eoc_flux";
  if (with_div) out << ",err_div,eoc_div";
  out << '\n';
  auto num = [](const std::optional<double>& v, bool sci) {
    if (!v) return std::string();
    std::ostringstream s;
    if (sci) {
      s << std::scientific << std::setprecision(6) << *v;
    } else {
      s << std::fixed << std::setprecision(4) << *v;
    }
    return s.str();
  };
  for (const LevelReport& r : rows) {
    const bool ok = r.status == SolveStatus::Converged;
    out << r.level << ',' << r.dofs << ',';
    if (ok) {
      out << r.iterations << ',' << num(r.kappa, false);
    } else {
      out << "N/A,N/A";
    }
    out << ',' << num(r.err_u, true) << ',' << num(r.eoc_u, false) << ',' << num(r.err_flux, true) << ','
        << num(r.eoc_flux, false);
    if (with_div) out << ',' << num(r.err_div, true) << ',' << num(r.eoc_div, false);
    out << '\n';
  }
}

}  // namespace hdg
