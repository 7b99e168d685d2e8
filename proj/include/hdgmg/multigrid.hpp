#pragma once

#include <limits>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include "hdgmg/krylov.hpp"
#include "hdgmg/smoothers.hpp"
#include "hdgmg/transfer.hpp"

namespace hdg {

enum class CycleType { V, W, VariableV };

CycleType parse_cycle(std::string_view name);
std::string_view to_string(CycleType c);

struct CycleConfig {
  CycleType type = CycleType::V;
  /// Smoothing steps on the finest level; with VariableV, level l uses
  /// steps * 2^(finest - l).
  int steps = 2;
  SmootherKind smoother = SmootherKind::PointGaussSeidel;
  /// Damping for the Jacobi variants; NaN selects 0.5 (point) or 0.4 (block).
  double damping = std::numeric_limits<double>::quiet_NaN();
};

double default_damping(SmootherKind k);

/// One level of a multigrid hierarchy. Level matrices are rediscretizations,
/// never Galerkin products.
struct MgLevelInput {
  CsrMatrix matrix;
  const FacetSpace* space = nullptr;
  /// Prolongation from the next coarser level; empty on the coarsest level.
  CsrMatrix prolongation;
  /// Non-empty selects the divergence-corrected transfer into this level.
  BubbleSpaceIndex bubbles;
};

class Multigrid {
 public:
  /// `levels` is ordered coarsest first.
  Multigrid(std::vector<MgLevelInput> levels, const CycleConfig& config);
  Multigrid(const Multigrid&) = delete;
  Multigrid& operator=(const Multigrid&) = delete;

  int num_levels() const { return static_cast<int>(levels_.size()); }
  const CsrMatrix& matrix(int l) const { return *levels_[l]->matrix; }
  const CsrMatrix& finest_matrix() const { return *levels_.back()->matrix; }
  int steps_at(int l) const;

  /// One cycle on level l starting from the current x.
  void cycle(int l, std::span<const double> b, std::span<double> x) const;
  /// out = B r: one cycle on the finest level from a zero initial guess.
  void apply(std::span<const double> r, std::span<double> out) const;
  LinearOperator preconditioner() const;

  /// Repeats cycles until ||b - Ax|| <= tol ||b||. Reports Diverged when the
  /// relative residual exceeds `blowup` or becomes non-finite.
  KrylovReport solve(std::span<const double> b, std::span<double> x, double tol = 1e-8, int max_iter = 500,
                     double blowup = 1e3) const;

 private:
  struct Level {
    std::unique_ptr<CsrMatrix> matrix;
    Smoother smoother;
    CsrMatrix p;
    CsrMatrix pt;
    std::unique_ptr<DivCorrectedProlongation> corrected;
  };

  void prolongate(int l, std::span<const double> coarse, std::span<double> fine) const;
  void restrict_residual(int l, std::span<const double> fine, std::span<double> coarse) const;

  CycleConfig config_;
  std::vector<std::unique_ptr<Level>> levels_;
  DenseCholesky coarse_solver_;
};

}  // namespace hdg
