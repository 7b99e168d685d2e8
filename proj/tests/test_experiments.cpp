#include <doctest.h>

#include <cmath>
#include <sstream>

#include "hdgmg/experiments.hpp"

using namespace hdg;

namespace {

std::vector<std::string> lines_of(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

std::vector<std::string> fields_of(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

std::string csv(const std::vector<LevelReport>& rows, bool div) {
  std::ostringstream s;
  write_csv(s, rows, div);
  return s.str();
}

}  // namespace

TEST_CASE("CSV layout, empty fields and N/A") {
  LevelReport ok;
  ok.level = 2;
  ok.dofs = 56;
  ok.iterations = 9;
  ok.kappa = 1.23456;
  ok.err_u = 1.5e-3;
  ok.eoc_u = 1.99;
  LevelReport bad;
  bad.level = 3;
  bad.dofs = 208;
  bad.status = SolveStatus::Diverged;
  const std::vector<std::string> l = lines_of(csv({ok, bad}, true));
  REQUIRE(l.size() == 3);
  CHECK(l[0] == "level,dofs,iters,kappa,err_u,eoc_u,err_flux,eoc_flux,err_div,eoc_div");
  CHECK(l[1] == "2,56,9,1.2346,1.500000e-03,1.9900,,,,");
  CHECK(l[2] == "3,208,N/A,N/A,,,,,,");
  CHECK(lines_of(csv({ok}, false))[0] == "level,dofs,iters,kappa,err_u,eoc_u,err_flux,eoc_flux");
  CHECK(fields_of(lines_of(csv({ok}, false))[1]).size() == 8);
}

TEST_CASE("configuration validation") {
  auto rejects = [](auto mutate) {
    ExperimentConfig c;
    mutate(c);
    CHECK_THROWS_AS(run_converge_diffusion(c), std::invalid_argument);
  };
  rejects([](ExperimentConfig& c) { c.dim = 4; });
  rejects([](ExperimentConfig& c) { c.levels = 0; });
  rejects([](ExperimentConfig& c) { c.min_level = 3, c.levels = 2; });
  rejects([](ExperimentConfig& c) { c.cycle.steps = 0; });
  rejects([](ExperimentConfig& c) { c.tol = 0.0; });
  rejects([](ExperimentConfig& c) { c.epsilon = -1.0; });
  rejects([](ExperimentConfig& c) { c.beta = -1.0; });
  rejects([](ExperimentConfig& c) { c.uzawa_steps = 0; });
  rejects([](ExperimentConfig& c) { c.rho = 0.0; });
  CHECK(parse_mode("solver") == SolveMode::Solver);
  CHECK(parse_mode("precond") == SolveMode::Preconditioner);
  CHECK_THROWS_AS(parse_mode("direct"), std::invalid_argument);
}

TEST_CASE("single level study has finite errors and no EOC") {
  ExperimentConfig c;
  c.levels = 1;
  const auto rows = run_converge_diffusion(c);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].err_u.has_value());
  CHECK(std::isfinite(*rows[0].err_u));
  CHECK_FALSE(rows[0].eoc_u.has_value());
  CHECK_FALSE(rows[0].eoc_flux.has_value());
  const auto f = fields_of(lines_of(csv(rows, false))[1]);
  CHECK(f[5].empty());
  CHECK(f[7].empty());
}

TEST_CASE("studies are deterministic") {
  ExperimentConfig c;
  c.levels = 3;
  CHECK(csv(run_converge_diffusion(c), false) == csv(run_converge_diffusion(c), false));
  c.beta = 0.0;
  c.cycle.smoother = SmootherKind::BlockGaussSeidel;
  CHECK(csv(run_converge_stokes(c), true) == csv(run_converge_stokes(c), true));
  c.diffusion = DiffusionScenario::Chessboard;
  c.rho = 100.0;
  c.cycle.smoother = SmootherKind::PointGaussSeidel;
  c.coarse_cells = 4;
  c.min_level = 2;
  const auto a = run_mg_diffusion(c);
  CHECK(a.size() == 2);
  CHECK(csv(a, false) == csv(run_mg_diffusion(c), false));
}

TEST_CASE("convergence studies improve with refinement") {
  ExperimentConfig c;
  c.levels = 3;
  c.beta = 0.0;
  c.cycle.smoother = SmootherKind::BlockGaussSeidel;
  const auto rows = run_converge_stokes(c);
  REQUIRE(rows.size() == 3);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    CHECK(*rows[i].err_u < *rows[i - 1].err_u);
    CHECK(rows[i].eoc_div.has_value());
  }
  CHECK(*rows.back().eoc_u > 1.7);
  CHECK(rows.back().status == SolveStatus::Converged);
}

TEST_CASE("chessboard coefficient and coarse averages") {
  const MeshHierarchy h(build_unit_box_mesh_cells(2, 2), 2);
  for (CoarseAverage avg : {CoarseAverage::Mean, CoarseAverage::InverseMean}) {
    const auto a = chessboard_alpha(h, 2, 4, 9.0, avg);
    REQUIRE(a.size() == 2);
    for (Index k = 0; k < h.level(1).num_elements(); ++k) {
      const Point& x = h.level(1).elem_barycenter(k);
      const int parity = (static_cast<int>(x[0] * 4) + static_cast<int>(x[1] * 4)) % 2;
      CHECK(a[1][k] == (parity ? 9.0 : 1.0));
    }
    // Each coarse cell of the 2x2 mesh covers both colors equally.
    const double expected = avg == CoarseAverage::Mean ? 5.0 : 1.0 / ((1.0 + 1.0 / 9.0) / 2.0);
    for (double v : a[0]) CHECK(v == doctest::Approx(expected));
  }
}

TEST_CASE("flow benchmarks: backward step W-cycle and lid-driven beta = 0") {
  ExperimentConfig c;
  c.stokes = StokesScenario::BackwardStep;
  c.beta = 0.0;
  c.levels = 3;
  c.min_level = 2;
  c.cycle.type = CycleType::W;
  c.cycle.steps = 6;
  c.cycle.smoother = SmootherKind::BlockGaussSeidel;
  const auto step = run_mg_stokes(c);
  REQUIRE(step.size() == 2);
  for (const auto& r : step) {
    CHECK(r.status == SolveStatus::Converged);
    CHECK(r.iterations <= 9);
  }
  c.stokes = StokesScenario::LidDriven;
  c.cycle.type = CycleType::VariableV;
  c.cycle.steps = 1;
  c.levels = 4;
  const auto lid = run_mg_stokes(c);
  for (const auto& r : lid) {
    CHECK(r.status == SolveStatus::Converged);
    CHECK(r.iterations <= 25);
    CHECK(r.kappa.has_value());
  }
}
