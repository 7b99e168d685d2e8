#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "hdgmg/linalg.hpp"

namespace hdg {

enum class SolveStatus {
  Converged,
  MaxIterations,
  /// Non-positive curvature or preconditioner energy; the preconditioner is unusable.
  Indefinite,
  /// Residual grew beyond a blow-up threshold (stationary iterations).
  Diverged,
};

std::string_view to_string(SolveStatus s);

/// Norm of the residual used by the PCG stopping test.
enum class StoppingNorm {
  Euclidean,       // ||r||_2 / ||b||_2
  Preconditioned,  // sqrt(r^T M r / r0^T M r0)
};

struct KrylovReport {
  SolveStatus status = SolveStatus::MaxIterations;
  int iterations = 0;
  std::vector<double> residual_history;  // ||r_k||_2 / ||b||_2
  std::vector<double> lanczos_diag;
  std::vector<double> lanczos_offdiag;
};

/// Preconditioned conjugate gradients. By default stops when ||b - Ax||_2 <= rel_tol ||b||_2.
/// `x` holds the initial guess on entry. A null preconditioner means identity.
KrylovReport pcg(const LinearOperator& a, std::span<const double> b, std::span<double> x,
                 const LinearOperator& precond, double rel_tol = 1e-8, int max_iter = 500,
                 StoppingNorm stop = StoppingNorm::Euclidean);

/// Ratio of the extreme eigenvalues of the symmetric tridiagonal matrix, by
/// Sturm-sequence bisection. Throws std::invalid_argument for fewer than two
/// diagonal entries.
double estimate_condition_number(std::span<const double> diag, std::span<const double> offdiag);

/// Extreme eigenvalues (min, max) of a symmetric tridiagonal matrix.
std::pair<double, double> tridiagonal_extreme_eigenvalues(std::span<const double> diag,
                                                          std::span<const double> offdiag);

}  // namespace hdg
