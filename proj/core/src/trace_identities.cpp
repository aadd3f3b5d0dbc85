#include <cmath>
#include <numbers>

#include "nctopo/invariants.hpp"

namespace nctopo {

namespace {

double rel_dev(double value, double reference) {
  return reference != 0.0 ? std::abs(value - reference) / std::abs(reference) : std::abs(value);
}

// sum over lattice points a*i with |x| <= R of a^d (1+|x|^2)^{-s/2}; points on the sphere
// get half weight (trapezoid end correction).
double ball_sum(int d, double a, double radius, double s) {
  const int m = int(std::floor(radius / a + 1e-9));
  double sum = 0.0;
  Coord i{0, 0, 0};
  const int lim[3] = {m, d > 1 ? m : 0, d > 2 ? m : 0};
  for (i[2] = -lim[2]; i[2] <= lim[2]; ++i[2])
    for (i[1] = -lim[1]; i[1] <= lim[1]; ++i[1])
      for (i[0] = -lim[0]; i[0] <= lim[0]; ++i[0]) {
        const double r2 = a * a * (double(i[0]) * i[0] + double(i[1]) * i[1] + double(i[2]) * i[2]);
        const double r = std::sqrt(r2);
        if (r > radius + 1e-9) continue;
        const double w = std::abs(r - radius) < 1e-9 ? 0.5 : 1.0;
        sum += w * std::pow(1.0 + r2, -0.5 * s);
      }
  return sum * std::pow(a, d);
}

// Vol(S^{d-1}) int_R^inf r^{d-1} (1+r^2)^{-s/2} dr via the binomial series in 1/r^2 (R > 1).
double radial_tail(int d, double radius, double s) {
  double sum = 0.0, coeff = 1.0;
  for (int k = 0; k < 200; ++k) {
    const double term = coeff * std::pow(radius, d - s - 2.0 * k) / (s + 2.0 * k - d);
    sum += term;
    if (std::abs(term) < 1e-17 * std::abs(sum)) break;
    coeff *= (-0.5 * s - k) / (k + 1.0);
  }
  return unit_sphere_area(d) * sum;
}

double closed_form(int d, double s) {
  return unit_sphere_area(d) * std::tgamma(0.5 * d) * std::tgamma(0.5 * (s - d)) / (2.0 * std::tgamma(0.5 * s));
}

// Neville evaluation at 0 of the interpolating polynomial through (x_k, y_k).
double extrapolate_to_zero(std::vector<double> x, std::vector<double> y) {
  const std::size_t n = x.size();
  for (std::size_t level = 1; level < n; ++level)
    for (std::size_t i = 0; i + level < n; ++i)
      y[i] = (x[i + level] * y[i] - x[i] * y[i + 1]) / (x[i + level] - x[i]);
  return y[0];
}

}  // namespace

double unit_sphere_area(int d) { return 2.0 * std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d); }

ResidueReport residue_check(int d, std::span<const double> s_list, double weight, const ResidueOptions& opt) {
  if (d < 1 || d > 3) throw std::invalid_argument("residue_check: dimension must be 1..3");
  for (double s : s_list)
    if (!(s > d)) throw std::invalid_argument("residue_check: every s must exceed d");
  if (!(opt.radius > 1.0)) throw std::invalid_argument("residue_check: radius must exceed 1");

  ResidueReport rep;
  rep.dim = d;
  rep.weight = weight;
  rep.spacing = opt.spacing;
  rep.radius = opt.radius;
  auto zeta = [&](double s) {
    return weight * (ball_sum(d, opt.spacing, opt.radius, s) + radial_tail(d, opt.radius, s));
  };
  for (double s : s_list) {
    ZetaPoint pt;
    pt.s = s;
    pt.lattice = zeta(s);
    pt.closed_form = weight * closed_form(d, s);
    pt.rel_dev = rel_dev(pt.lattice, pt.closed_form);
    rep.points.push_back(pt);
  }
  std::vector<double> xs, ys;
  for (double eps : opt.offsets) {
    xs.push_back(eps);
    ys.push_back(eps * zeta(d + eps));
  }
  rep.residue_estimate = xs.empty() ? 0.0 : extrapolate_to_zero(xs, ys);
  rep.residue_expected = unit_sphere_area(d) * weight;
  rep.residue_rel_dev = rel_dev(rep.residue_estimate, rep.residue_expected);
  return rep;
}

int CompactKernel::support_radius() const {
  int r = 0;
  for (const auto& t : terms)
    for (int k = 0; k < 3; ++k) r = std::max(r, std::abs(t.offset[k]));
  return r;
}

HsReport hs_norm_check(const CompactKernel& f, const Grid& grid, double s, double twist) {
  if (!(s > grid.dim)) throw std::invalid_argument("hs_norm_check: s must exceed d");
  if (grid.dofs != 1) throw std::invalid_argument("hs_norm_check: scalar kernels only");
  for (int k = 0; k < grid.dim; ++k)
    if (4 * f.support_radius() >= grid.extent[k])
      throw std::invalid_argument("hs_norm_check: kernel support touches the box boundary");

  const double vol = grid.cell_volume();
  const std::size_t n = grid.sites();
  arma::cx_mat pi_f(n, n, arma::fill::zeros);
  for (std::size_t x = 0; x < n; ++x) {
    const Coord cx = grid.coords(x);
    for (const auto& t : f.terms) {
      Coord cy = cx;
      bool inside = true;
      for (int k = 0; k < grid.dim; ++k) {
        cy[k] += t.offset[k];
        inside = inside && cy[k] >= 0 && cy[k] < grid.extent[k];
      }
      if (!inside) continue;
      const std::size_t y = grid.site_index(cy);
      double wedge = 0.0;
      if (grid.dim >= 2) wedge = grid.position(x, 0) * grid.position(y, 1) - grid.position(x, 1) * grid.position(y, 0);
      pi_f(x, y) += vol * t.value * std::polar(1.0, twist * wedge);
    }
  }
  arma::vec weight(n);
  double c_s = 0.0;
  for (std::size_t y = 0; y < n; ++y) {
    double r2 = 0.0;
    for (int k = 0; k < grid.dim; ++k) r2 += grid.position(y, k) * grid.position(y, k);
    weight(y) = std::pow(1.0 + r2, -0.25 * s);
    c_s += vol * weight(y) * weight(y);
  }
  const arma::cx_mat weighted = pi_f.each_row() % arma::conv_to<arma::cx_rowvec>::from(weight.t());
  const double fro = arma::norm(weighted, "fro");

  double mass = 0.0;
  for (const auto& t : f.terms) mass += vol * std::norm(t.value);

  HsReport rep;
  rep.lhs = fro * fro;
  rep.c_s = c_s;
  rep.rhs = c_s * mass;
  rep.rel_dev = rel_dev(rep.lhs, rep.rhs);
  return rep;
}

}  // namespace nctopo
