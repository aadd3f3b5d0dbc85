#include "nctopo/invariants.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace nctopo {

namespace {

constexpr std::complex<double> I{0.0, 1.0};
constexpr double pi = std::numbers::pi;

double factorial(int n) { return n <= 1 ? 1.0 : n * factorial(n - 1); }

int permutation_sign(const std::vector<int>& perm) {
  int sign = 1;
  for (std::size_t i = 0; i < perm.size(); ++i)
    for (std::size_t j = i + 1; j < perm.size(); ++j)
      if (perm[i] > perm[j]) sign = -sign;
  return sign;
}

arma::uvec expand_dofs(const std::vector<std::size_t>& sites, int dofs) {
  arma::uvec idx(sites.size() * std::size_t(dofs));
  std::size_t k = 0;
  for (auto s : sites)
    for (int q = 0; q < dofs; ++q) idx(k++) = s * std::size_t(dofs) + std::size_t(q);
  return idx;
}

}  // namespace

std::vector<std::size_t> window_sites(const Grid& grid, const TraceWindow& w) {
  if (!(w.core_fraction > 0.0) || w.core_fraction > 1.0) throw std::invalid_argument("trace window: core_fraction must be in (0, 1]");
  Coord lo{0, 0, 0}, hi{1, 1, 1};
  for (int k = 0; k < grid.dim; ++k) {
    const int n = grid.extent[k];
    const int m = std::max(1, int(std::lround(w.core_fraction * n)));
    lo[k] = (n - m) / 2;
    hi[k] = lo[k] + m;
    if (!grid.periodic[k]) {
      lo[k] = std::max(lo[k], w.margin);
      hi[k] = std::min(hi[k], n - w.margin);
    }
    if (hi[k] <= lo[k]) throw std::invalid_argument("trace window: empty core region");
  }
  std::vector<std::size_t> out;
  for (std::size_t s = 0; s < grid.sites(); ++s) {
    const Coord c = grid.coords(s);
    bool in = true;
    for (int k = 0; k < grid.dim; ++k) in = in && c[k] >= lo[k] && c[k] < hi[k];
    if (in) out.push_back(s);
  }
  return out;
}

std::string to_string(Method m) {
  switch (m) {
    case Method::cyclic_even: return "cyclic_even";
    case Method::cyclic_odd: return "cyclic_odd";
    case Method::fredholm_kernel: return "fredholm_kernel";
    case Method::kitaev_triple: return "kitaev_triple";
    case Method::mod2: return "mod2";
    case Method::edge_winding: return "edge_winding";
  }
  return "?";
}

std::complex<double> trace_per_unit_volume(const arma::cx_mat& a, const Grid& grid, const TraceWindow& w) {
  if (a.n_rows != grid.size() || a.n_cols != grid.size()) throw std::invalid_argument("trace_per_unit_volume: size mismatch");
  const auto sites = window_sites(grid, w);
  std::complex<double> sum = 0.0;
  for (auto s : sites)
    for (int q = 0; q < grid.dofs; ++q) {
      const std::size_t i = s * grid.dofs + q;
      sum += a(i, i);
    }
  return sum / (double(sites.size()) * grid.cell_volume());
}

arma::cx_mat position_commutator(const arma::cx_mat& a, const Grid& grid, int axis) {
  const std::size_t n = grid.size();
  arma::cx_mat out(n, n);
  for (std::size_t c = 0; c < n; ++c)
    for (std::size_t r = 0; r < n; ++r)
      out(r, c) = grid.displacement(r / grid.dofs, c / grid.dofs, axis) * a(r, c);
  return out;
}

std::complex<double> even_constant(int d) {
  return std::pow(-2.0 * pi * I, d / 2) / factorial(d / 2);
}

std::complex<double> odd_constant(int d) {
  const int n = (d - 1) / 2;
  return 2.0 * std::pow(2.0 * pi * I, n) * factorial(n) / factorial(2 * n + 1);
}

InvariantResult even_chern(const Projection& p, const TraceWindow& w) {
  const Grid& g = p.grid;
  if (g.dim % 2 != 0) throw std::invalid_argument("even_chern: dimension must be even");
  const auto sites = window_sites(g, w);
  const arma::uvec rows = expand_dofs(sites, g.dofs);

  std::vector<arma::cx_mat> deriv;
  for (int j = 0; j < g.dim; ++j) deriv.push_back(position_commutator(p.matrix, g, j));

  std::vector<int> perm(g.dim);
  std::iota(perm.begin(), perm.end(), 0);
  std::complex<double> sum = 0.0;
  const arma::cx_mat head = p.matrix.rows(rows);
  do {
    arma::cx_mat chain = head;
    for (int j = 0; j + 1 < g.dim; ++j) chain = chain * deriv[perm[j]];
    const arma::cx_mat& last = deriv[perm[g.dim - 1]];
    std::complex<double> diag = 0.0;
    for (arma::uword i = 0; i < rows.n_elem; ++i) diag += arma::dot(chain.row(i), last.col(rows(i)));
    sum += double(permutation_sign(perm)) * diag;
  } while (std::next_permutation(perm.begin(), perm.end()));

  InvariantResult r;
  r.method = Method::cyclic_even;
  r.window = w;
  r.value = even_constant(g.dim) * sum / (double(sites.size()) * g.cell_volume());
  return r;
}

InvariantResult odd_chern(const ChiralUnitary& u, const TraceWindow& w) {
  const Grid& g = u.grid;
  if (g.dim % 2 != 1) throw std::invalid_argument("odd_chern: dimension must be odd");
  const arma::cx_mat& m = u.matrix;
  if (arma::norm(m.t() * m - arma::eye<arma::cx_mat>(m.n_cols, m.n_cols), "inf") > 1e-6)
    throw std::invalid_argument("odd_chern: matrix is not unitary");

  std::vector<arma::cx_mat> term;  // U^* [X_j, U] on the column space
  for (int j = 0; j < g.dim; ++j) {
    arma::cx_mat c(m.n_rows, m.n_cols);
    for (arma::uword col = 0; col < m.n_cols; ++col)
      for (arma::uword row = 0; row < m.n_rows; ++row)
        c(row, col) = g.displacement(u.row_site[row], u.col_site[col], j) * m(row, col);
    term.push_back(m.t() * c);
  }

  const auto sites = window_sites(g, w);
  std::vector<bool> in_window(g.sites(), false);
  for (auto s : sites) in_window[s] = true;

  std::vector<int> perm(g.dim);
  std::iota(perm.begin(), perm.end(), 0);
  std::complex<double> sum = 0.0;
  do {
    arma::cx_mat prod = term[perm[0]];
    for (int j = 1; j < g.dim; ++j) prod = prod * term[perm[j]];
    std::complex<double> diag = 0.0;
    for (arma::uword k = 0; k < m.n_cols; ++k)
      if (in_window[u.col_site[k]]) diag += prod(k, k);
    sum += double(permutation_sign(perm)) * diag;
  } while (std::next_permutation(perm.begin(), perm.end()));

  InvariantResult r;
  r.method = Method::cyclic_odd;
  r.window = w;
  r.value = odd_constant(g.dim) * sum / (double(sites.size()) * g.cell_volume());
  return r;
}

}  // namespace nctopo
