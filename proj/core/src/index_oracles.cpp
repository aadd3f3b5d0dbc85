#include <algorithm>
#include <cmath>
#include <numbers>

#include "nctopo/invariants.hpp"

namespace nctopo {

namespace {

Point box_center(const Grid&) { return {0.0, 0.0, 0.0}; }

arma::cx_vec phase_diagonal(const Grid& g, const Point& center) {
  arma::cx_vec f(g.size());
  for (std::size_t s = 0; s < g.sites(); ++s) {
    const std::complex<double> z(g.position(s, 0) - center[0], g.position(s, 1) - center[1]);
    const std::complex<double> phase = std::abs(z) < 1e-12 ? std::complex<double>(1.0, 0.0) : z / std::abs(z);
    for (int q = 0; q < g.dofs; ++q) f(s * g.dofs + q) = phase;
  }
  return f;
}

arma::vec bulk_mask(const Grid& g, const TraceWindow& w) {
  arma::vec mask(g.size(), arma::fill::zeros);
  for (auto s : window_sites(g, w))
    for (int q = 0; q < g.dofs; ++q) mask(s * g.dofs + q) = 1.0;
  return mask;
}

// Kernel and cokernel counts of the compression V^* F V, V an orthonormal basis of ran P.
IndexReport count_kernel(const arma::cx_mat& basis, const Grid& g, const FredholmOptions& opt) {
  if (g.dim != 2) throw std::invalid_argument("fredholm_index: dimension must be 2");
  IndexReport rep;
  if (basis.n_cols == 0) return rep;

  const arma::cx_vec f = phase_diagonal(g, opt.center.value_or(box_center(g)));
  const arma::cx_mat fv = basis.each_col() % f;
  const arma::cx_mat m = basis.t() * fv;
  arma::cx_mat left, right;
  arma::vec sv;
  if (!arma::svd(left, sv, right, m, "std")) throw std::runtime_error("fredholm_index: SVD failed");

  // ascending order
  const arma::uword r = sv.n_elem;
  std::vector<double> asc(sv.begin(), sv.end());
  std::reverse(asc.begin(), asc.end());

  double best_ratio = 0.0;
  long cut = -1;  // asc[0..cut] are small
  for (arma::uword i = 0; i < r && asc[i] < opt.search_ceiling; ++i) {
    const double next = i + 1 < r ? asc[i + 1] : 1.0;
    const double ratio = next / std::max(asc[i], 1e-300);
    if (ratio > best_ratio) {
      best_ratio = ratio;
      cut = long(i);
    }
  }
  if (cut < 0) return rep;
  if (best_ratio < opt.min_gap_ratio)
    throw AmbiguousIndex("fredholm_index: no singular-value gap with ratio >= " + std::to_string(opt.min_gap_ratio) +
                         " (best " + std::to_string(best_ratio) + ")");
  const double next = std::size_t(cut) + 1 < r ? asc[cut + 1] : 1.0;
  rep.threshold = std::sqrt(std::max(asc[cut], 1e-300) * next);
  rep.gap_ratio = best_ratio;

  const arma::vec mask = bulk_mask(g, opt.bulk);
  for (long i = 0; i <= cut; ++i) {
    rep.small_values.push_back(asc[i]);
    const arma::uword col = r - 1 - arma::uword(i);  // descending position
    const arma::cx_vec ker = basis * right.col(col);
    const arma::cx_vec coker = basis * left.col(col);
    const double wk = arma::dot(mask, arma::square(arma::abs(ker)));
    const double wc = arma::dot(mask, arma::square(arma::abs(coker)));
    if (wk > opt.localization_weight) ++rep.kernel;
    if (wc > opt.localization_weight) ++rep.cokernel;
  }
  rep.index = rep.kernel - rep.cokernel;
  return rep;
}

}  // namespace

IndexReport fredholm_index(const Projection& p, const FredholmOptions& opt) { return count_kernel(p.basis, p.grid, opt); }

SectorPartition kitaev_sectors(const Grid& g, const TraceWindow& w, std::optional<Point> center) {
  if (g.dim != 2) throw std::invalid_argument("kitaev_sectors: dimension must be 2");
  const Point c = center.value_or(box_center(g));
  constexpr double third = 2.0 * std::numbers::pi / 3.0;
  SectorPartition out;
  for (auto s : window_sites(g, w)) {
    const double phi = std::atan2(g.position(s, 1) - c[1], g.position(s, 0) - c[0]);
    if (phi >= 0.0 && phi < third)
      out.a.push_back(s);
    else if (phi < 0.0 && phi >= -third)
      out.b.push_back(s);
    else
      out.c.push_back(s);
  }
  return out;
}

double kitaev_triple(const Projection& p, const SectorPartition& regions) {
  const Grid& g = p.grid;
  std::vector<int> owner(g.sites(), 0);
  for (const auto* part : {&regions.a, &regions.b, &regions.c})
    for (auto s : *part)
      if (owner.at(s)++ != 0) throw std::invalid_argument("kitaev_triple: regions overlap");

  auto idx = [&](const std::vector<std::size_t>& sites) {
    arma::uvec v(sites.size() * g.dofs);
    std::size_t k = 0;
    for (auto s : sites)
      for (int q = 0; q < g.dofs; ++q) v(k++) = s * g.dofs + q;
    return v;
  };
  const arma::uvec a = idx(regions.a), b = idx(regions.b), c = idx(regions.c);
  const arma::cx_mat& m = p.matrix;
  const std::complex<double> forward = arma::trace(m.submat(a, b) * m.submat(b, c) * m.submat(c, a));
  const std::complex<double> backward = arma::trace(m.submat(a, c) * m.submat(c, b) * m.submat(b, a));
  return (12.0 * std::numbers::pi * std::complex<double>(0.0, 1.0) * (forward - backward)).real();
}

Mod2Report mod2_index(const Projection& p, const AntiUnitary& tr, const FredholmOptions& opt, const arma::cx_mat* spin) {
  const arma::uword n = p.matrix.n_rows;
  if (tr.unitary.n_rows != n) throw std::invalid_argument("mod2_index: time reversal size mismatch");
  const arma::cx_mat square = tr.unitary * arma::conj(tr.unitary);
  if (arma::norm(square + arma::eye<arma::cx_mat>(n, n), "inf") > 1e-10)
    throw std::invalid_argument("mod2_index: time reversal must square to -1");
  if (arma::norm(tr.conjugate(p.matrix) - p.matrix, "inf") > 1e-6)
    throw std::invalid_argument("mod2_index: projection breaks time reversal");

  Mod2Report rep;
  rep.counts = count_kernel(p.basis, p.grid, opt);
  rep.kernel = rep.counts.kernel;
  rep.bit = int(rep.kernel % 2);

  if (spin) {
    if (arma::norm(*spin * p.matrix - p.matrix * *spin, "inf") > 1e-8)
      throw std::invalid_argument("mod2_index: spin does not commute with the projection");
    const arma::cx_mat up = 0.5 * (arma::eye<arma::cx_mat>(n, n) + *spin);
    arma::vec ev;
    arma::cx_mat vecs;
    const arma::cx_mat pu = up * p.matrix * up;
    arma::eig_sym(ev, vecs, arma::cx_mat(0.5 * (pu + pu.t())));
    const arma::uvec occ = arma::find(ev > 0.5);
    const IndexReport per_spin = count_kernel(vecs.cols(occ), p.grid, opt);
    rep.spin_index = per_spin.index;
    rep.reduction_agrees = ((per_spin.index % 2) + 2) % 2 == rep.bit;
  }
  return rep;
}

}  // namespace nctopo
