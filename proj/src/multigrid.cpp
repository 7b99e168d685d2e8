#include "hdgmg/multigrid.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace hdg {

CycleType parse_cycle(std::string_view name) {
  if (name == "v") return CycleType::V;
  if (name == "w") return CycleType::W;
  if (name == "varv") return CycleType::VariableV;
  throw std::invalid_argument("unknown cycle '" + std::string(name) + "'");
}

std::string_view to_string(CycleType c) {
  switch (c) {
    case CycleType::V:
      return "v";
    case CycleType::W:
      return "w";
    case CycleType::VariableV:
      return "varv";
  }
  return "?";
}

double default_damping(SmootherKind k) { return is_block(k) ? 0.4 : 0.5; }

Multigrid::Multigrid(std::vector<MgLevelInput> levels, const CycleConfig& config) : config_(config) {
  if (levels.empty()) throw std::invalid_argument("multigrid needs at least one level");
  if (config_.steps < 1) throw std::invalid_argument("smoothing steps must be positive");
  if (std::isnan(config_.damping)) config_.damping = default_damping(config_.smoother);
  for (std::size_t l = 0; l < levels.size(); ++l) {
    auto lev = std::make_unique<Level>();
    lev->matrix = std::make_unique<CsrMatrix>(std::move(levels[l].matrix));
    if (l > 0) {
      if (!levels[l].space) throw std::invalid_argument("multigrid level without a facet space");
      lev->smoother = Smoother::make(config_.smoother, *lev->matrix, *levels[l].space, config_.damping);
      const CsrMatrix& p = levels[l].prolongation;
      if (p.rows() != lev->matrix->rows() || p.cols() != levels_[l - 1]->matrix->rows()) {
        throw std::invalid_argument("prolongation shape does not match level sizes");
      }
      if (!levels[l].bubbles.dofs.empty()) {
        lev->corrected =
            std::make_unique<DivCorrectedProlongation>(std::move(levels[l].prolongation), *lev->matrix,
                                                       std::move(levels[l].bubbles));
      } else {
        lev->p = std::move(levels[l].prolongation);
        lev->pt = lev->p.transpose();
      }
    }
    levels_.push_back(std::move(lev));
  }
  const CsrMatrix& a0 = *levels_[0]->matrix;
  coarse_solver_ = DenseCholesky(a0.rows(), to_dense(a0));
}

int Multigrid::steps_at(int l) const {
  if (config_.type != CycleType::VariableV) return config_.steps;
  return config_.steps << (num_levels() - 1 - l);
}

void Multigrid::prolongate(int l, std::span<const double> coarse, std::span<double> fine) const {
  const Level& lev = *levels_[l];
  if (lev.corrected) {
    lev.corrected->prolongate(coarse, fine);
  } else {
    lev.p.multiply(coarse, fine);
  }
}

void Multigrid::restrict_residual(int l, std::span<const double> fine, std::span<double> coarse) const {
  const Level& lev = *levels_[l];
  if (lev.corrected) {
    lev.corrected->restrict_transpose(fine, coarse);
  } else {
    lev.pt.multiply(fine, coarse);
  }
}

void Multigrid::cycle(int l, std::span<const double> b, std::span<double> x) const {
  if (l == 0) {
    std::copy(b.begin(), b.end(), x.begin());
    coarse_solver_.solve(x);
    return;
  }
  const Level& lev = *levels_[l];
  const int m = steps_at(l);
  const int q = config_.type == CycleType::W ? 2 : 1;
  const Index n = lev.matrix->rows();
  const Index nc = levels_[l - 1]->matrix->rows();

  for (int j = 0; j < m; ++j) lev.smoother.smooth(b, x, false);

  std::vector<double> r(n), rc(nc), ec(nc, 0.0), e(n);
  lev.matrix->multiply(x, r);
  for (Index i = 0; i < n; ++i) r[i] = b[i] - r[i];
  restrict_residual(l, r, rc);
  for (int k = 0; k < q; ++k) cycle(l - 1, rc, ec);
  prolongate(l, ec, e);
  for (Index i = 0; i < n; ++i) x[i] += e[i];

  for (int j = 0; j < m; ++j) lev.smoother.smooth(b, x, true);
}

void Multigrid::apply(std::span<const double> r, std::span<double> out) const {
  std::fill(out.begin(), out.end(), 0.0);
  cycle(num_levels() - 1, r, out);
}

LinearOperator Multigrid::preconditioner() const {
  return [this](std::span<const double> r, std::span<double> out) { apply(r, out); };
}

KrylovReport Multigrid::solve(std::span<const double> b, std::span<double> x, double tol, int max_iter,
                              double blowup) const {
  KrylovReport rep;
  const CsrMatrix& a = finest_matrix();
  std::vector<double> r(b.size());
  auto rel_residual = [&]() {
    a.multiply(x, r);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = b[i] - r[i];
    return norm2(r);
  };
  const double bnorm = norm2(b);
  if (bnorm == 0.0) {
    std::fill(x.begin(), x.end(), 0.0);
    rep.status = SolveStatus::Converged;
    rep.residual_history.push_back(0.0);
    return rep;
  }
  double rel = rel_residual() / bnorm;
  rep.residual_history.push_back(rel);
  for (int it = 1; it <= max_iter; ++it) {
    if (rel <= tol) {
      rep.status = SolveStatus::Converged;
      return rep;
    }
    cycle(num_levels() - 1, b, x);
    rep.iterations = it;
    rel = rel_residual() / bnorm;
    rep.residual_history.push_back(rel);
    if (!std::isfinite(rel) || rel > blowup) {
      rep.status = SolveStatus::Diverged;
      return rep;
    }
  }
  rep.status = rel <= tol ? SolveStatus::Converged : SolveStatus::MaxIterations;
  return rep;
}

}  // namespace hdg
