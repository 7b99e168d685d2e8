#include "hdgmg/smoothers.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace hdg {

SmootherKind parse_smoother(std::string_view name) {
  if (name == "pjac") return SmootherKind::PointJacobi;
  if (name == "pgs") return SmootherKind::PointGaussSeidel;
  if (name == "bjac") return SmootherKind::BlockJacobi;
  if (name == "bgs") return SmootherKind::BlockGaussSeidel;
  throw std::invalid_argument("unknown smoother '" + std::string(name) + "'");
}

std::string_view to_string(SmootherKind k) {
  switch (k) {
    case SmootherKind::PointJacobi:
      return "pjac";
    case SmootherKind::PointGaussSeidel:
      return "pgs";
    case SmootherKind::BlockJacobi:
      return "bjac";
    case SmootherKind::BlockGaussSeidel:
      return "bgs";
  }
  return "?";
}

bool is_block(SmootherKind k) { return k == SmootherKind::BlockJacobi || k == SmootherKind::BlockGaussSeidel; }

VertexPatchIndex build_vertex_patches(const FacetSpace& space) {
  const MeshLevel& mesh = space.mesh();
  VertexPatchIndex idx;
  idx.patches.resize(mesh.num_vertices());
  for (Index f = 0; f < mesh.num_facets(); ++f) {
    if (space.is_dirichlet(f)) continue;
    for (int j = 0; j < mesh.dim(); ++j) {
      auto& patch = idx.patches[mesh.facet(f)[j]];
      for (int c = 0; c < space.components(); ++c) patch.push_back(space.dof(f, c));
    }
  }
  // Facets are visited in increasing order, so each patch is already sorted.
  return idx;
}

std::vector<double> extract_block(const CsrMatrix& a, std::span<const Index> idx) {
  const std::size_t m = idx.size();
  std::vector<double> block(m * m, 0.0);
  for (std::size_t r = 0; r < m; ++r) {
    const Index row = idx[r];
    // Merge the sorted row pattern with the sorted index set.
    Index p = a.row_ptr()[row];
    const Index pe = a.row_ptr()[row + 1];
    std::size_t c = 0;
    while (p < pe && c < m) {
      const Index col = a.col_idx()[p];
      if (col == idx[c]) {
        block[r * m + c] = a.values()[p];
        ++p;
        ++c;
      } else if (col < idx[c]) {
        ++p;
      } else {
        ++c;
      }
    }
  }
  return block;
}

namespace {

void check_diagonal(const CsrMatrix& a, std::vector<double>& inv, std::vector<Index>& pos) {
  inv.resize(a.rows());
  pos.resize(a.rows());
  for (Index i = 0; i < a.rows(); ++i) {
    const auto first = a.col_idx().begin() + a.row_ptr()[i];
    const auto last = a.col_idx().begin() + a.row_ptr()[i + 1];
    const auto it = std::lower_bound(first, last, i);
    if (it == last || *it != i || !(a.values()[it - a.col_idx().begin()] > 0.0)) {
      throw std::invalid_argument("smoother needs a positive diagonal");
    }
    pos[i] = static_cast<Index>(it - a.col_idx().begin());
    inv[i] = 1.0 / a.values()[pos[i]];
  }
}

}  // namespace

Smoother Smoother::point_jacobi(const CsrMatrix& a, double damping) {
  Smoother s;
  s.kind_ = SmootherKind::PointJacobi;
  s.a_ = &a;
  s.damping_ = damping;
  check_diagonal(a, s.inv_diag_, s.diag_pos_);
  return s;
}

Smoother Smoother::point_gauss_seidel(const CsrMatrix& a) {
  Smoother s;
  s.kind_ = SmootherKind::PointGaussSeidel;
  s.a_ = &a;
  check_diagonal(a, s.inv_diag_, s.diag_pos_);
  return s;
}

static std::vector<DenseCholesky> factor_patches(const CsrMatrix& a, const VertexPatchIndex& patches) {
  std::vector<DenseCholesky> f;
  f.reserve(patches.patches.size());
  for (const auto& p : patches.patches) {
    const std::vector<double> block = extract_block(a, p);
    f.emplace_back(static_cast<int>(p.size()), block);
  }
  return f;
}

Smoother Smoother::block_jacobi(const CsrMatrix& a, VertexPatchIndex patches, double damping) {
  Smoother s;
  s.kind_ = SmootherKind::BlockJacobi;
  s.a_ = &a;
  s.damping_ = damping;
  s.factors_ = factor_patches(a, patches);
  s.patches_ = std::move(patches);
  return s;
}

Smoother Smoother::block_gauss_seidel(const CsrMatrix& a, VertexPatchIndex patches) {
  Smoother s;
  s.kind_ = SmootherKind::BlockGaussSeidel;
  s.a_ = &a;
  s.factors_ = factor_patches(a, patches);
  s.patches_ = std::move(patches);
  return s;
}

Smoother Smoother::make(SmootherKind kind, const CsrMatrix& a, const FacetSpace& space, double damping) {
  switch (kind) {
    case SmootherKind::PointJacobi:
      return point_jacobi(a, damping);
    case SmootherKind::PointGaussSeidel:
      return point_gauss_seidel(a);
    case SmootherKind::BlockJacobi:
      return block_jacobi(a, build_vertex_patches(space), damping);
    case SmootherKind::BlockGaussSeidel:
      return block_gauss_seidel(a, build_vertex_patches(space));
  }
  throw std::invalid_argument("unknown smoother kind");
}

void Smoother::patch_solve(std::size_t v, std::span<double> local) const { factors_[v].solve(local); }

void Smoother::block_gs_step(std::size_t v, std::span<const double> b, std::span<double> x,
                             std::vector<double>& local) const {
  const auto& dofs = patches_.patches[v];
  if (dofs.empty()) return;
  const auto rp = a_->row_ptr();
  const auto ci = a_->col_idx();
  const auto va = a_->values();
  local.resize(dofs.size());
  for (std::size_t r = 0; r < dofs.size(); ++r) {
    const Index row = dofs[r];
    double s = b[row];
    for (Index p = rp[row]; p < rp[row + 1]; ++p) s -= va[p] * x[ci[p]];
    local[r] = s;
  }
  factors_[v].solve(local);
  for (std::size_t r = 0; r < dofs.size(); ++r) x[dofs[r]] += local[r];
}

void Smoother::smooth(std::span<const double> b, std::span<double> x, bool transpose) const {
  const Index n = a_->rows();
  const auto rp = a_->row_ptr();
  const auto ci = a_->col_idx();
  const auto va = a_->values();
  switch (kind_) {
    case SmootherKind::PointJacobi: {
      std::vector<double> r(n);
      a_->multiply(x, r);
      for (Index i = 0; i < n; ++i) x[i] += damping_ * inv_diag_[i] * (b[i] - r[i]);
      break;
    }
    case SmootherKind::PointGaussSeidel: {
      auto relax = [&](Index i) {
        double s = b[i];
        for (Index p = rp[i]; p < rp[i + 1]; ++p) s -= va[p] * x[ci[p]];
        x[i] += s * inv_diag_[i];
      };
      if (!transpose) {
        for (Index i = 0; i < n; ++i) relax(i);
      } else {
        for (Index i = n - 1; i >= 0; --i) relax(i);
      }
      break;
    }
    case SmootherKind::BlockJacobi: {
      std::vector<double> r(n), corr(n, 0.0), local;
      a_->multiply(x, r);
      for (Index i = 0; i < n; ++i) r[i] = b[i] - r[i];
      for (std::size_t v = 0; v < patches_.patches.size(); ++v) {
        const auto& dofs = patches_.patches[v];
        if (dofs.empty()) continue;
        local.resize(dofs.size());
        for (std::size_t q = 0; q < dofs.size(); ++q) local[q] = r[dofs[q]];
        patch_solve(v, local);
        for (std::size_t q = 0; q < dofs.size(); ++q) corr[dofs[q]] += local[q];
      }
      for (Index i = 0; i < n; ++i) x[i] += damping_ * corr[i];
      break;
    }
    case SmootherKind::BlockGaussSeidel: {
      std::vector<double> local;
      const std::size_t nv = patches_.patches.size();
      if (!transpose) {
        for (std::size_t v = 0; v < nv; ++v) block_gs_step(v, b, x, local);
      } else {
        for (std::size_t v = nv; v-- > 0;) block_gs_step(v, b, x, local);
      }
      break;
    }
  }
}

void Smoother::apply(std::span<const double> r, std::span<double> out, bool transpose) const {
  std::fill(out.begin(), out.end(), 0.0);
  smooth(r, out, transpose);
}

}  // namespace hdg
