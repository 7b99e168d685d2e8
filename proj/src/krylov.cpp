#include "hdgmg/krylov.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hdg {

std::string_view to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Converged:
      return "converged";
    case SolveStatus::MaxIterations:
      return "max-iterations";
    case SolveStatus::Indefinite:
      return "indefinite";
    case SolveStatus::Diverged:
      return "diverged";
  }
  return "unknown";
}

KrylovReport pcg(const LinearOperator& a, std::span<const double> b, std::span<double> x,
                 const LinearOperator& precond, double rel_tol, int max_iter, StoppingNorm stop) {
  const std::size_t n = b.size();
  KrylovReport rep;
  std::vector<double> r(n), z(n), p(n), q(n);
  a(x, q);
  for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - q[i];
  const double bnorm = norm2(b);
  if (bnorm == 0.0) {
    std::fill(x.begin(), x.end(), 0.0);
    rep.status = SolveStatus::Converged;
    rep.residual_history.push_back(0.0);
    return rep;
  }
  double rel = norm2(r) / bnorm;
  rep.residual_history.push_back(rel);
  if (rel <= rel_tol) {
    rep.status = SolveStatus::Converged;
    return rep;
  }
  auto apply_m = [&](std::span<const double> in, std::span<double> out) {
    if (precond) {
      precond(in, out);
    } else {
      std::copy(in.begin(), in.end(), out.begin());
    }
  };
  apply_m(r, z);
  double rz = dot(r, z);
  if (!(rz > 0.0)) {
    rep.status = SolveStatus::Indefinite;
    return rep;
  }
  const double rz0 = rz;
  p = z;
  double alpha_prev = 0.0, beta_prev = 0.0;
  for (int it = 1; it <= max_iter; ++it) {
    a(p, q);
    const double pq = dot(p, q);
    if (!(pq > 0.0)) {
      rep.status = SolveStatus::Indefinite;
      return rep;
    }
    const double alpha = rz / pq;
    axpy(alpha, p, x);
    axpy(-alpha, q, r);
    rep.iterations = it;
    rep.lanczos_diag.push_back(1.0 / alpha + (it > 1 ? beta_prev / alpha_prev : 0.0));
    rel = norm2(r) / bnorm;
    rep.residual_history.push_back(rel);
    if (stop == StoppingNorm::Euclidean && rel <= rel_tol) {
      rep.status = SolveStatus::Converged;
      return rep;
    }
    apply_m(r, z);
    const double rz_new = dot(r, z);
    if (!(rz_new > 0.0)) {
      rep.status = SolveStatus::Indefinite;
      return rep;
    }
    if (stop == StoppingNorm::Preconditioned && std::sqrt(rz_new / rz0) <= rel_tol) {
      rep.status = SolveStatus::Converged;
      return rep;
    }
    const double beta = rz_new / rz;
    rep.lanczos_offdiag.push_back(std::sqrt(beta) / alpha);
    for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    rz = rz_new;
    alpha_prev = alpha;
    beta_prev = beta;
  }
  rep.status = SolveStatus::MaxIterations;
  return rep;
}

namespace {

// Number of eigenvalues strictly below x.
int sturm_count(std::span<const double> d, std::span<const double> e, double x) {
  int count = 0;
  double q = 1.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    const double e2 = i == 0 ? 0.0 : e[i - 1] * e[i - 1];
    q = d[i] - x - (i == 0 ? 0.0 : e2 / q);
    if (q == 0.0) q = -1e-300;
    if (q < 0.0) ++count;
  }
  return count;
}

double kth_eigenvalue(std::span<const double> d, std::span<const double> e, int k, double lo, double hi) {
  // Smallest x with sturm_count(x) > k, i.e. the (k+1)-th smallest eigenvalue.
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (sturm_count(d, e, mid) > k) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

std::pair<double, double> tridiagonal_extreme_eigenvalues(std::span<const double> diag,
                                                          std::span<const double> offdiag) {
  const std::size_t n = diag.size();
  if (n == 0) throw std::invalid_argument("empty tridiagonal matrix");
  if (offdiag.size() + 1 < n) throw std::invalid_argument("off-diagonal too short");
  double lo = diag[0], hi = diag[0];
  for (std::size_t i = 0; i < n; ++i) {
    const double r = (i > 0 ? std::abs(offdiag[i - 1]) : 0.0) + (i + 1 < n ? std::abs(offdiag[i]) : 0.0);
    lo = std::min(lo, diag[i] - r);
    hi = std::max(hi, diag[i] + r);
  }
  const double pad = 1e-12 * std::max(std::abs(lo), std::abs(hi)) + 1e-300;
  lo -= pad;
  hi += pad;
  const auto e = offdiag.subspan(0, n - 1);
  return {kth_eigenvalue(diag, e, 0, lo, hi), kth_eigenvalue(diag, e, static_cast<int>(n) - 1, lo, hi)};
}

double estimate_condition_number(std::span<const double> diag, std::span<const double> offdiag) {
  if (diag.size() < 2) throw std::invalid_argument("condition estimate needs at least two CG iterations");
  const auto [lmin, lmax] = tridiagonal_extreme_eigenvalues(diag, offdiag);
  if (!(lmin > 0.0)) throw std::domain_error("tridiagonal matrix is not positive definite");
  return lmax / lmin;
}

}  // namespace hdg
