#include "hdgmg/transfer.hpp"

#include <algorithm>
#include <stdexcept>

namespace hdg {

CsrMatrix build_prolongation(const FacetSpace& coarse, const FacetSpace& fine, const RefinementMaps& maps) {
  const MeshLevel& cm = coarse.mesh();
  const MeshLevel& fm = fine.mesh();
  const int comps = fine.components();
  if (coarse.components() != comps) throw std::invalid_argument("component mismatch in prolongation");
  if (maps.facet_parent.size() != static_cast<std::size_t>(fm.num_facets())) {
    throw std::invalid_argument("refinement maps do not match the fine mesh");
  }
  const int n = cm.nodes_per_element();
  std::vector<Triplet> trip;
  auto add_element = [&](Index fine_facet, Index k, double scale) {
    const Point& x = fm.facet_barycenter(fine_facet);
    for (int i = 0; i < n; ++i) {
      const Index cf = cm.elem_facet(k, i);
      if (coarse.is_dirichlet(cf)) continue;
      const double v = scale * cr_basis_value(cm, k, i, x);
      if (v == 0.0) continue;
      for (int c = 0; c < comps; ++c) trip.push_back({fine.dof(fine_facet, c), coarse.dof(cf, c), v});
    }
  };
  for (Index f = 0; f < fm.num_facets(); ++f) {
    if (fine.is_dirichlet(f)) continue;
    const FacetParent& par = maps.facet_parent[f];
    if (par.kind == FacetParent::Kind::InteriorOfCoarseElement) {
      add_element(f, par.id, 1.0);
    } else {
      const auto& adj = cm.facet_elems(par.id);
      if (adj[1] == kNoIndex) {
        add_element(f, adj[0], 1.0);
      } else {
        add_element(f, adj[0], 0.5);
        add_element(f, adj[1], 0.5);
      }
    }
  }
  return assemble_from_triplets(fine.n_free(), coarse.n_free(), std::move(trip));
}

CsrMatrix weighted_restriction(const CsrMatrix& p, std::span<const double> coarse_weights,
                               std::span<const double> fine_weights) {
  if (static_cast<Index>(coarse_weights.size()) != p.cols() || static_cast<Index>(fine_weights.size()) != p.rows())
    throw std::invalid_argument("weighted_restriction: weight sizes do not match the prolongation");
  const CsrMatrix pt = p.transpose();
  std::vector<double> vals(pt.values().begin(), pt.values().end());
  for (Index i = 0; i < pt.rows(); ++i) {
    for (Index q = pt.row_ptr()[i]; q < pt.row_ptr()[i + 1]; ++q) {
      vals[q] *= fine_weights[pt.col_idx()[q]] / coarse_weights[i];
    }
  }
  return CsrMatrix(pt.rows(), pt.cols(), std::vector<Index>(pt.row_ptr().begin(), pt.row_ptr().end()),
                   std::vector<Index>(pt.col_idx().begin(), pt.col_idx().end()), std::move(vals));
}

BubbleSpaceIndex build_bubble_index(const FacetSpace& fine, const RefinementMaps& maps, Index num_coarse_elements) {
  BubbleSpaceIndex idx;
  idx.dofs.resize(num_coarse_elements);
  const MeshLevel& fm = fine.mesh();
  for (Index f = 0; f < fm.num_facets(); ++f) {
    const FacetParent& par = maps.facet_parent[f];
    if (par.kind != FacetParent::Kind::InteriorOfCoarseElement || fine.is_dirichlet(f)) continue;
    for (int c = 0; c < fine.components(); ++c) idx.dofs[par.id].push_back(fine.dof(f, c));
  }
  for (auto& v : idx.dofs) std::sort(v.begin(), v.end());
  return idx;
}

DivCorrectedProlongation::DivCorrectedProlongation(CsrMatrix p_avg, const CsrMatrix& a_fine, BubbleSpaceIndex bubbles)
    : p_(std::move(p_avg)), a_(&a_fine), bubbles_(std::move(bubbles)) {
  factors_.reserve(bubbles_.dofs.size());
  std::vector<double> block;
  for (const auto& dofs : bubbles_.dofs) {
    const int m = static_cast<int>(dofs.size());
    block.assign(static_cast<std::size_t>(m) * m, 0.0);
    for (int r = 0; r < m; ++r) {
      for (int c = 0; c < m; ++c) block[static_cast<std::size_t>(r) * m + c] = a_->at(dofs[r], dofs[c]);
    }
    factors_.emplace_back(m, block);
  }
}

void DivCorrectedProlongation::prolongate(std::span<const double> coarse, std::span<double> fine) const {
  p_.multiply(coarse, fine);
  std::vector<double> local;
  const auto rp = a_->row_ptr();
  const auto ci = a_->col_idx();
  const auto va = a_->values();
  // Bubble sets of different coarse elements are not coupled by the fine
  // operator, so the corrections can be computed from the uncorrected w.
  std::vector<double> w(fine.begin(), fine.end());
  for (std::size_t t = 0; t < bubbles_.dofs.size(); ++t) {
    const auto& dofs = bubbles_.dofs[t];
    local.resize(dofs.size());
    for (std::size_t r = 0; r < dofs.size(); ++r) {
      double s = 0.0;
      for (Index q = rp[dofs[r]]; q < rp[dofs[r] + 1]; ++q) s += va[q] * w[ci[q]];
      local[r] = s;
    }
    factors_[t].solve(local);
    for (std::size_t r = 0; r < dofs.size(); ++r) fine[dofs[r]] -= local[r];
  }
}

void DivCorrectedProlongation::restrict_transpose(std::span<const double> fine, std::span<double> coarse) const {
  // (I - E Abb^-1 E^T A)^T = I - A E Abb^-1 E^T
  std::vector<double> r(fine.begin(), fine.end());
  std::vector<double> local;
  const auto rp = a_->row_ptr();
  const auto ci = a_->col_idx();
  const auto va = a_->values();
  for (std::size_t t = 0; t < bubbles_.dofs.size(); ++t) {
    const auto& dofs = bubbles_.dofs[t];
    local.resize(dofs.size());
    for (std::size_t q = 0; q < dofs.size(); ++q) local[q] = fine[dofs[q]];
    factors_[t].solve(local);
    // r -= A E c, using the symmetry of A to walk the bubble rows.
    for (std::size_t q = 0; q < dofs.size(); ++q) {
      const Index row = dofs[q];
      for (Index p = rp[row]; p < rp[row + 1]; ++p) r[ci[p]] -= va[p] * local[q];
    }
  }
  p_.multiply_transpose(r, coarse);
}

}  // namespace hdg
