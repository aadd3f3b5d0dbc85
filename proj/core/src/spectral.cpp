#include "nctopo/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace nctopo {

arma::cx_mat SpectralData::apply(const std::function<std::complex<double>(double)>& f) const {
  arma::cx_vec fv(eigenvalues.n_elem);
  for (arma::uword i = 0; i < eigenvalues.n_elem; ++i) fv(i) = f(eigenvalues(i));
  arma::cx_mat scaled = eigenvectors;
  scaled.each_row() %= fv.st();
  return scaled * eigenvectors.t();
}

arma::cx_mat SpectralData::reconstruct() const {
  return apply([](double x) { return std::complex<double>(x, 0.0); });
}

SpectralData diagonalize(const OperatorKernel& h, std::uint64_t source_hash) {
  const arma::cx_mat& m = h.matrix;
  if (!m.is_square()) throw std::invalid_argument("diagonalize: matrix is not square");
  const double scale = std::max(1.0, arma::norm(m, "inf"));
  if (arma::norm(m - m.t(), "inf") > 1e-12 * scale) throw std::invalid_argument("diagonalize: matrix is not Hermitian");
  SpectralData sd;
  sd.grid = h.grid;
  sd.source_hash = source_hash;
  if (m.is_empty()) return sd;
  // symmetrize away rounding so the solver sees an exactly Hermitian matrix
  const arma::cx_mat herm = 0.5 * (m + m.t());
  if (!arma::eig_sym(sd.eigenvalues, sd.eigenvectors, herm, "dc"))
    throw std::runtime_error("diagonalize: eigensolver failed");
  return sd;
}

Projection projection_from_basis(const arma::cx_mat& basis, const Grid& grid) {
  Projection p;
  p.grid = grid;
  p.basis = basis;
  p.rank = long(basis.n_cols);
  p.matrix = basis.n_cols == 0 ? arma::cx_mat(basis.n_rows, basis.n_rows, arma::fill::zeros) : arma::cx_mat(basis * basis.t());
  p.gap_distance = std::numeric_limits<double>::infinity();
  return p;
}

Projection fermi_projection(const SpectralData& sd, double mu, double gap_tolerance) {
  const arma::uword n = sd.eigenvalues.n_elem;
  arma::uword occ = 0;
  while (occ < n && sd.eigenvalues(occ) <= mu) ++occ;
  Projection p = occ == 0 ? projection_from_basis(arma::cx_mat(n, 0), sd.grid)
                          : projection_from_basis(sd.eigenvectors.cols(0, occ - 1), sd.grid);
  p.mu = mu;
  double dist = std::numeric_limits<double>::infinity();
  for (arma::uword i = 0; i < n; ++i) dist = std::min(dist, std::abs(sd.eigenvalues(i) - mu));
  p.gap_distance = dist;
  p.near_degenerate = n > 0 && dist <= gap_tolerance * std::max(sd.width(), 1.0);
  return p;
}

ChiralUnitary ChiralUnitary::on_grid(arma::cx_mat u, const Grid& grid) {
  ChiralUnitary cu;
  cu.grid = grid;
  cu.matrix = std::move(u);
  for (std::size_t i = 0; i < cu.matrix.n_rows; ++i) cu.row_site.push_back(i / grid.dofs);
  for (std::size_t i = 0; i < cu.matrix.n_cols; ++i) cu.col_site.push_back(i / grid.dofs);
  return cu;
}

ChiralUnitary fermi_unitary(const SpectralData& sd, const arma::cx_mat& chiral, bool mobility_gap, double gap_tolerance) {
  const arma::uword n = sd.eigenvalues.n_elem;
  if (chiral.n_rows != n || chiral.n_cols != n) throw std::invalid_argument("fermi_unitary: chiral operator size mismatch");
  if (arma::norm(chiral - arma::diagmat(chiral.diag()), "inf") > 0.0)
    throw std::invalid_argument("fermi_unitary: chiral involution must be diagonal in the lattice basis");
  std::vector<arma::uword> plus, minus;
  for (arma::uword i = 0; i < n; ++i) {
    const auto r = chiral(i, i);
    if (r == std::complex<double>(1.0, 0.0))
      plus.push_back(i);
    else if (r == std::complex<double>(-1.0, 0.0))
      minus.push_back(i);
    else
      throw std::invalid_argument("fermi_unitary: chiral involution must have entries +-1");
  }
  if (plus.size() != minus.size()) throw std::invalid_argument("fermi_unitary: chiral sectors of unequal size");

  const arma::cx_mat h = sd.reconstruct();
  const double scale = std::max(1.0, arma::norm(h, "inf"));
  if (arma::norm(chiral * h * chiral + h, "inf") > 1e-8 * scale)
    throw std::invalid_argument("fermi_unitary: Hamiltonian is not chiral");
  const double gap = n ? arma::min(arma::abs(sd.eigenvalues)) : 0.0;
  if (!mobility_gap && gap <= gap_tolerance * scale)
    throw std::domain_error("fermi_unitary: no spectral gap at zero energy");

  // sgn(0) = -1, matching 1 - 2 P with P = chi_(-inf, 0].
  const arma::cx_mat sgn = sd.apply([](double x) { return std::complex<double>(x > 0.0 ? 1.0 : -1.0, 0.0); });
  const arma::uvec rows(std::vector<arma::uword>(minus.begin(), minus.end()));
  const arma::uvec cols(std::vector<arma::uword>(plus.begin(), plus.end()));
  ChiralUnitary cu;
  cu.grid = sd.grid;
  cu.matrix = sgn.submat(rows, cols);
  for (auto r : minus) cu.row_site.push_back(r / sd.grid.dofs);
  for (auto c : plus) cu.col_site.push_back(c / sd.grid.dofs);
  return cu;
}

SwitchFunction::SwitchFunction(SwitchKind kind, double center, double half_width)
    : kind_(kind), center_(center), half_width_(half_width) {
  if (!(half_width > 0.0)) throw std::invalid_argument("switch_function: empty gap");
}

double SwitchFunction::operator()(double x) const {
  // smoothstep t^3 (10 - 15 t + 6 t^2) in the centered variable u = 2t - 1, where its odd part
  // (15 u - 10 u^3 + 3 u^5) / 16 is exactly odd in floating point
  const double u = std::clamp((x - center_) / half_width_, -1.0, 1.0);
  const double u2 = u * u;
  const double odd = std::clamp(u * (15.0 - u2 * (10.0 - 3.0 * u2)) / 8.0, -1.0, 1.0);
  return kind_ == SwitchKind::exp ? 0.5 + 0.5 * odd : odd;
}

SwitchFunction switch_function(SwitchKind kind, double center, double half_width) {
  return SwitchFunction(kind, center, half_width);
}

}  // namespace nctopo
