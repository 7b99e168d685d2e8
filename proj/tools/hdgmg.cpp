// Command-line driver for the HDG-P0 experiments. Writes one CSV table per run.
#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <string>

#include "hdgmg/experiments.hpp"

namespace {

struct Options {
  hdg::ExperimentConfig cfg;
  std::string smoother;  // pgs for diffusion, bgs for Stokes
  std::string cycle = "v";
  std::string mode = "precond";
  std::string scenario;
  std::string average = "mean";
  std::string stop = "l2";
  double damping = 0.0;
  std::string out;
  bool timing = false;
};

void add_common(CLI::App* cmd, Options& o, bool mg_study) {
  cmd->add_option("--dim", o.cfg.dim, "Spatial dimension")->check(CLI::IsMember({2, 3}));
  cmd->add_option("--levels", o.cfg.levels, "Number of mesh levels J")->check(CLI::Range(1, 12));
  cmd->add_option("--coarse-cells", o.cfg.coarse_cells, "Cells per axis of the coarsest mesh")->check(CLI::NonNegativeNumber);
  cmd->add_option("--coarse-h", o.cfg.coarse_h, "Target diameter of the coarsest mesh")->check(CLI::PositiveNumber);
  cmd->add_option("--smoother", o.smoother, "Smoother")->check(CLI::IsMember({"pjac", "pgs", "bjac", "bgs"}));
  cmd->add_option("--steps", o.cfg.cycle.steps, "Smoothing steps m on the finest level")->check(CLI::PositiveNumber);
  cmd->add_option("--damping", o.damping, "Jacobi damping (0 selects the default)")->check(CLI::NonNegativeNumber);
  cmd->add_option("--cycle", o.cycle, "Cycle type")->check(CLI::IsMember({"v", "w", "varv"}));
  cmd->add_option("--mode", o.mode, "Stationary solver or PCG preconditioner")->check(CLI::IsMember({"solver", "precond"}));
  cmd->add_option("--tol", o.cfg.tol, "Relative residual tolerance")->check(CLI::PositiveNumber);
  cmd->add_option("--max-iter", o.cfg.max_iter, "Iteration limit")->check(CLI::PositiveNumber);
  cmd->add_option("--stop-norm", o.stop, "PCG stopping test: Euclidean or preconditioned residual norm")
      ->check(CLI::IsMember({"l2", "precond"}));
  cmd->add_option("--out", o.out, "CSV output file (default: stdout)");
  cmd->add_flag("--timing", o.timing, "Print per-level wall time to stderr");
  if (mg_study) {
    cmd->add_option("--min-level", o.cfg.min_level, "First reported level")->check(CLI::PositiveNumber);
  }
}

void add_stokes(CLI::App* cmd, Options& o) {
  cmd->add_option("--beta", o.cfg.beta, "Reaction coefficient")->check(CLI::NonNegativeNumber);
  cmd->add_option("--mu", o.cfg.mu, "Viscosity")->check(CLI::PositiveNumber);
  cmd->add_option("--eps", o.cfg.epsilon, "Augmented Lagrangian penalty epsilon")->check(CLI::PositiveNumber);
  cmd->add_option("--uzawa-steps", o.cfg.uzawa_steps, "Uzawa iterations")->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"HDG-P0 discretizations with geometric multigrid"};
  app.require_subcommand(1);
  Options o;

  auto* cd = app.add_subcommand("converge-diffusion", "Error and EOC table for the smooth diffusion problem");
  add_common(cd, o, false);
  auto* cs = app.add_subcommand("converge-stokes", "Error and EOC table for the manufactured Stokes problem");
  add_common(cs, o, false);
  add_stokes(cs, o);
  auto* md = app.add_subcommand("mg-diffusion", "Multigrid iteration counts for diffusion");
  add_common(md, o, true);
  md->add_option("--scenario", o.scenario, "Coefficient scenario")->check(CLI::IsMember({"smooth", "chessboard"}));
  md->add_option("--rho", o.cfg.rho, "Chessboard coefficient ratio")->check(CLI::PositiveNumber);
  md->add_option("--coarse-average", o.average, "Coarse-level chessboard coefficient")
      ->check(CLI::IsMember({"inverse", "mean"}));
  auto* ms = app.add_subcommand("mg-stokes", "Multigrid iteration counts for Stokes");
  add_common(ms, o, true);
  add_stokes(ms, o);
  ms->add_option("--scenario", o.scenario, "Flow problem")->check(CLI::IsMember({"manufactured", "lid", "step"}));

  CLI11_PARSE(app, argc, argv);

  try {
    if (o.smoother.empty()) o.smoother = (cs->parsed() || ms->parsed()) ? "bgs" : "pgs";
    o.cfg.cycle.smoother = hdg::parse_smoother(o.smoother);
    o.cfg.cycle.type = hdg::parse_cycle(o.cycle);
    if (o.damping > 0.0) o.cfg.cycle.damping = o.damping;
    o.cfg.mode = hdg::parse_mode(o.mode);
    o.cfg.stop = o.stop == "precond" ? hdg::StoppingNorm::Preconditioned : hdg::StoppingNorm::Euclidean;
    o.cfg.coarse_average = o.average == "mean" ? hdg::CoarseAverage::Mean : hdg::CoarseAverage::InverseMean;
    if (o.scenario == "chessboard") o.cfg.diffusion = hdg::DiffusionScenario::Chessboard;
    if (o.scenario == "lid") o.cfg.stokes = hdg::StokesScenario::LidDriven;
    if (o.scenario == "step") o.cfg.stokes = hdg::StokesScenario::BackwardStep;

    std::vector<hdg::LevelReport> rows;
    bool with_div = false;
    if (cd->parsed()) {
      rows = hdg::run_converge_diffusion(o.cfg);
    } else if (cs->parsed()) {
      rows = hdg::run_converge_stokes(o.cfg);
      with_div = true;
    } else if (md->parsed()) {
      rows = hdg::run_mg_diffusion(o.cfg);
    } else {
      rows = hdg::run_mg_stokes(o.cfg);
    }

    if (o.out.empty()) {
      hdg::write_csv(std::cout, rows, with_div);
    } else {
      std::ofstream file(o.out);
      if (!file) throw std::runtime_error("cannot open " + o.out);
      hdg::write_csv(file, rows, with_div);
    }
    if (o.timing) {
      for (const auto& r : rows) std::fprintf(stderr, "level %d: %.2f s\n", r.level, r.seconds);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
