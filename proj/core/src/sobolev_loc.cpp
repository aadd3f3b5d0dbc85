#include "nctopo/sobolev_loc.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace nctopo {

namespace {

std::vector<Coord> multi_indices(int dim, int order) {
  std::vector<Coord> out;
  Coord a{0, 0, 0};
  const int hi1 = dim > 1 ? order : 0, hi2 = dim > 2 ? order : 0;
  for (a[2] = 0; a[2] <= hi2; ++a[2])
    for (a[1] = 0; a[1] <= hi1; ++a[1])
      for (a[0] = 0; a[0] <= order; ++a[0])
        if (a[0] + a[1] + a[2] <= order) out.push_back(a);
  return out;
}

arma::cx_mat derivative(const arma::cx_mat& a, const Grid& g, const Coord& alpha) {
  if (alpha == Coord{0, 0, 0}) return a;
  const std::size_t n = g.size();
  arma::cx_mat out(n, n);
  for (std::size_t c = 0; c < n; ++c)
    for (std::size_t r = 0; r < n; ++r) {
      double w = 1.0;
      for (int k = 0; k < g.dim; ++k)
        if (alpha[k]) w *= std::pow(g.displacement(r / g.dofs, c / g.dofs, k), alpha[k]);
      out(r, c) = w * a(r, c);
    }
  return out;
}

// Tvol(|B|^p) over the window.
double abs_power_trace(const arma::cx_mat& b, const Grid& g, int p, const TraceWindow& w) {
  const arma::cx_mat gram = b.t() * b;
  arma::vec diag;
  switch (p) {
    case 2: diag = arma::real(gram.diag()); break;
    case 4: diag = arma::sum(arma::square(arma::abs(gram)), 1); break;
    case 6: {
      const arma::cx_mat g2 = gram * gram;
      diag = arma::real(arma::sum(gram % g2.st(), 1));
      break;
    }
    case 1: {
      // |B| = V S V^* from the SVD; avoids square roots of round-off eigenvalues of B^* B
      arma::cx_mat left, right;
      arma::vec sv;
      arma::svd(left, sv, right, b);
      arma::mat weights = arma::square(arma::abs(right));
      weights.each_row() %= sv.t();
      diag = arma::sum(weights, 1);
      break;
    }
    default: throw std::invalid_argument("sobolev_norm: unsupported p");
  }
  const auto sites = window_sites(g, w);
  double sum = 0.0;
  for (auto s : sites)
    for (int q = 0; q < g.dofs; ++q) sum += diag(s * g.dofs + q);
  return sum / (double(sites.size()) * g.cell_volume());
}

double block_norm(const arma::cx_mat& m, std::size_t x, std::size_t y, int q) {
  if (q == 1) return std::abs(m(x, y));
  return arma::norm(m.submat(x * q, y * q, x * q + q - 1, y * q + q - 1), 2);
}

struct Binner {
  std::vector<double> sum;
  std::vector<long> count;

  void add(double r, double a, double v) {
    const auto bin = std::size_t(std::lround(r / a));
    if (bin >= sum.size()) {
      sum.resize(bin + 1, 0.0);
      count.resize(bin + 1, 0);
    }
    sum[bin] += v;
    count[bin] += 1;
  }

  DecayProfile profile(double a) const {
    DecayProfile p;
    for (std::size_t b = 0; b < sum.size(); ++b) {
      if (count[b] == 0) continue;
      p.distance.push_back(b * a);
      p.mean.push_back(sum[b] / double(count[b]));
      p.count.push_back(count[b]);
    }
    return p;
  }
};

double shortest_side(const Grid& g) {
  double l = g.length(0);
  for (int k = 1; k < g.dim; ++k) l = std::min(l, g.length(k));
  return l;
}

}  // namespace

double sobolev_norm(std::span<const OperatorKernel> ensemble, int r, int p, const TraceWindow& w) {
  if (r < 0 || r > 4) throw std::invalid_argument("sobolev_norm: derivative order must be in 0..4");
  if (p != 1 && p != 2 && p != 4 && p != 6) throw std::invalid_argument("sobolev_norm: p must be 1, 2, 4 or 6");
  if (ensemble.empty()) throw std::invalid_argument("sobolev_norm: empty ensemble");
  const Grid& g = ensemble.front().grid;
  double total = 0.0;
  for (const auto& alpha : multi_indices(g.dim, r)) {
    double mean = 0.0;
    for (const auto& a : ensemble) mean += abs_power_trace(derivative(a.matrix, a.grid, alpha), a.grid, p, w);
    mean /= double(ensemble.size());
    total += std::pow(std::max(mean, 0.0), 1.0 / p);
  }
  return total;
}

SobolevReport sobolev_report(std::span<const OperatorKernel> ensemble, int max_r, const std::vector<int>& ps,
                             const TraceWindow& w) {
  SobolevReport rep;
  for (int r = 0; r <= max_r; ++r)
    for (int p : ps) {
      const double v = sobolev_norm(ensemble, r, p, w);
      rep.norms[{r, p}] = v;
      rep.finite[{r, p}] = std::isfinite(v);
    }
  return rep;
}

DecayFit fit_decay(const DecayProfile& profile, double spacing, double box_length, const DecayFitOptions& opt) {
  DecayFit fit;
  fit.profile = profile;
  fit.box_length = box_length;
  fit.r_min = opt.r_min_sites * spacing;
  fit.r_max = opt.r_max_fraction * box_length;
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < profile.distance.size(); ++i) {
    const double r = profile.distance[i];
    if (r < fit.r_min - 1e-12 || r > fit.r_max + 1e-12 || !(profile.mean[i] > 0.0)) continue;
    xs.push_back(r);
    ys.push_back(std::log(profile.mean[i]));
  }
  if (xs.size() < 3) throw std::domain_error("decay fit: degenerate binning");

  const arma::vec x(xs), y(ys);
  const double n = double(x.n_elem);
  const double mx = arma::mean(x), my = arma::mean(y);
  const double sxx = arma::accu(arma::square(x - mx));
  const double sxy = arma::accu((x - mx) % (y - my));
  const double syy = arma::accu(arma::square(y - my));
  const double slope = sxy / sxx;
  const double icpt = my - slope * mx;
  const arma::vec resid = y - (icpt + slope * x);
  const double sse = arma::accu(arma::square(resid));
  fit.rate = -slope;
  fit.amplitude = std::exp(icpt);
  fit.r_squared = syy > 0.0 ? 1.0 - sse / syy : 0.0;
  fit.rate_ci = n > 2 ? 1.96 * std::sqrt(sse / (n - 2.0) / sxx) : arma::datum::inf;

  if (x.n_elem >= 4) {
    // quadratic term of log magnitude: Gaussian-type kernels bend downward
    arma::mat design(x.n_elem, 3);
    design.col(0).ones();
    design.col(1) = x - mx;
    design.col(2) = arma::square(x - mx);
    const arma::vec c = arma::solve(design, y);
    const double span = x.max() - x.min();
    fit.super_exponential = c(2) < 0.0 && std::abs(c(2)) * span * span >= 0.25 * std::abs(c(1)) * span;
  }
  fit.decays = fit.rate > 0.0 && fit.r_squared >= opt.r2_threshold && fit.rate * box_length >= opt.ml_threshold;
  return fit;
}

DecayFit kernel_decay_fit(std::span<const Projection> ensemble, const DecayFitOptions& opt) {
  if (int(ensemble.size()) < opt.min_samples) throw std::invalid_argument("kernel_decay_fit: insufficient samples");
  const Grid& g = ensemble.front().grid;
  Binner bins;
  bool any = false;
  for (const auto& p : ensemble) {
    any = any || p.rank > 0;
    for (std::size_t y = 0; y < g.sites(); ++y)
      for (std::size_t x = 0; x < g.sites(); ++x) bins.add(g.distance(x, y), g.spacing, block_norm(p.matrix, x, y, g.dofs));
  }
  if (!any) throw std::domain_error("kernel_decay_fit: degenerate binning (all projections vanish)");
  DecayFit fit = fit_decay(bins.profile(g.spacing), g.spacing, shortest_side(g), opt);
  fit.samples = int(ensemble.size());
  return fit;
}

FractionalMomentResult fractional_moment(std::span<const SpectralData> ensemble, const FractionalMomentOptions& opt) {
  if (!(opt.s > 0.0 && opt.s < 1.0)) throw std::invalid_argument("fractional_moment: s must lie in (0, 1)");
  if (!(opt.eta_fraction > 0.0)) throw std::invalid_argument("fractional_moment: eta must be positive");
  if (ensemble.empty() || opt.energies < 1) throw std::invalid_argument("fractional_moment: empty ensemble or energy grid");
  if (opt.energy_hi < opt.energy_lo) throw std::invalid_argument("fractional_moment: empty energy interval");

  const Grid& g = ensemble.front().grid;
  double width = 0.0;
  for (const auto& sd : ensemble) width = std::max(width, sd.width());
  FractionalMomentResult out;
  out.eta = opt.eta_fraction * std::max(width, 1e-12);

  Binner bins;
  for (const auto& sd : ensemble)
    for (int e = 0; e < opt.energies; ++e) {
      const double energy = opt.energies == 1 ? 0.5 * (opt.energy_lo + opt.energy_hi)
                                              : opt.energy_lo + (opt.energy_hi - opt.energy_lo) * e / (opt.energies - 1);
      const arma::cx_mat green =
          sd.apply([&](double l) { return 1.0 / std::complex<double>(l - energy, -out.eta); });
      for (std::size_t y = 0; y < g.sites(); ++y)
        for (std::size_t x = 0; x < g.sites(); ++x)
          bins.add(g.distance(x, y), g.spacing, std::pow(block_norm(green, x, y, g.dofs), opt.s));
    }
  const DecayProfile prof = bins.profile(g.spacing);
  out.intercept = prof.distance.empty() ? 0.0 : prof.mean.front();
  out.fit = fit_decay(prof, g.spacing, shortest_side(g), opt.fit);
  out.fit.samples = int(ensemble.size());
  return out;
}

std::string to_string(MobilityVerdict v) {
  switch (v) {
    case MobilityVerdict::spectral_gap: return "spectral_gap";
    case MobilityVerdict::mobility_gap_candidate: return "mobility_gap_candidate";
    case MobilityVerdict::delocalized: return "delocalized";
  }
  return "?";
}

MobilityReport mobility_report(std::span<const SpectralData> ensemble, double mu, const MobilityOptions& opt) {
  if (int(ensemble.size()) < opt.min_samples) throw std::invalid_argument("mobility_report: insufficient samples");
  MobilityReport rep;
  rep.mu = mu;
  const Grid& g = ensemble.front().grid;
  const double volume = double(g.sites()) * g.cell_volume();

  std::vector<Projection> projections;
  std::vector<OperatorKernel> kernels;
  rep.min_gap_distance = arma::datum::inf;
  double count = 0.0, window = 0.0;
  for (const auto& sd : ensemble) {
    const double h = opt.dos_window_fraction * std::max(sd.width(), 1e-12);
    window = 2.0 * h;
    count += double(arma::accu(arma::abs(sd.eigenvalues - mu) <= h));
    projections.push_back(fermi_projection(sd, mu));
    rep.min_gap_distance = std::min(rep.min_gap_distance, projections.back().gap_distance);
    kernels.push_back({projections.back().matrix, g, {}});
  }
  rep.dos = count / (double(ensemble.size()) * volume * window);

  DecayFitOptions fit_opt = opt.fit;
  fit_opt.min_samples = 1;
  try {
    rep.decay = kernel_decay_fit(projections, fit_opt);
  } catch (const std::domain_error&) {
    rep.decay = DecayFit{};  // nothing to fit; decays stays false
  }
  rep.sobolev = sobolev_report(kernels, 2, {1, 2});

  if (rep.dos <= opt.dos_cutoff)
    rep.verdict = MobilityVerdict::spectral_gap;
  else if (rep.decay.decays)
    rep.verdict = MobilityVerdict::mobility_gap_candidate;
  else
    rep.verdict = MobilityVerdict::delocalized;
  return rep;
}

}  // namespace nctopo
