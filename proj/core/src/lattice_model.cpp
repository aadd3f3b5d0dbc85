#include "nctopo/lattice_model.hpp"

#include <cmath>
#include <numbers>
#include <queue>
#include <random>

namespace nctopo {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

bool near_integer(double x, double tol = 1e-9) { return std::abs(x - std::round(x)) <= tol * std::max(1.0, std::abs(x)); }

int field_sign(const ModelConfig& c, int dof) { return c.dof_field_sign.empty() ? 1 : c.dof_field_sign[dof]; }

double onsite(const ModelConfig& c, int dof) { return c.dof_onsite.empty() ? 0.0 : c.dof_onsite[dof]; }

}  // namespace

int ModelConfig::sites(int axis) const {
  if (sites_per_axis[axis] > 0) return sites_per_axis[axis];
  return int(std::lround(box_length / spacing));
}

Grid ModelConfig::grid() const {
  Grid g;
  g.dim = dim;
  g.spacing = spacing;
  g.dofs = dofs;
  for (int k = 0; k < dim; ++k) {
    g.extent[k] = sites(k);
    switch (boundary) {
      case Boundary::magnetic_periodic: g.periodic[k] = true; break;
      case Boundary::dirichlet_all: g.periodic[k] = false; break;
      case Boundary::dirichlet_last_axis: g.periodic[k] = k + 1 < dim; break;
    }
  }
  return g;
}

double ModelConfig::flux_quanta(int j, int k) const {
  return field[j][k] * sites(j) * spacing * sites(k) * spacing / two_pi;
}

void ModelConfig::validate() const {
  if (dim < 1 || dim > 3) throw ConfigError("dimension must be 1, 2 or 3");
  if (!(spacing > 0.0)) throw ConfigError("spacing must be positive");
  for (int k = 0; k < dim; ++k) {
    if (sites_per_axis[k] == 0) {
      if (!(box_length > 0.0)) throw ConfigError("box_length must be positive");
      if (!near_integer(box_length / spacing)) throw ConfigError("box_length / spacing must be an integer site count");
    }
    if (sites(k) < 4) throw ConfigError("at least 4 sites per axis required");
  }
  for (int j = 0; j < 3; ++j)
    for (int k = 0; k < 3; ++k) {
      if (field[j][k] != -field[k][j]) throw ConfigError("field tensor must be exactly antisymmetric");
      if ((j >= dim || k >= dim) && field[j][k] != 0.0) throw ConfigError("field tensor has entries beyond the dimension");
    }
  if (potential.amplitude < 0.0) throw ConfigError("disorder amplitude W must be nonnegative");
  if (potential.kind == PotentialKind::random_bumps && !(potential.bump_radius > 0.0))
    throw ConfigError("bump radius must be positive");
  if (potential.kind == PotentialKind::quasi_periodic && potential.wavevectors.empty())
    throw ConfigError("quasi-periodic potential needs at least one wavevector");
  if (dofs < 1) throw ConfigError("internal dofs must be positive");
  if (!dof_field_sign.empty()) {
    if (int(dof_field_sign.size()) != dofs) throw ConfigError("dof_field_sign needs one entry per internal dof");
    for (int s : dof_field_sign)
      if (s != 1 && s != -1) throw ConfigError("dof_field_sign entries must be +1 or -1");
  }
  if (!dof_onsite.empty() && int(dof_onsite.size()) != dofs)
    throw ConfigError("dof_onsite needs one entry per internal dof");
  if (boundary == Boundary::magnetic_periodic) {
    for (int j = 0; j < dim; ++j)
      for (int k = j + 1; k < dim; ++k)
        if (!near_integer(flux_quanta(j, k)))
          throw ConfigError("flux quantization violated: B_jk L_j L_k / 2pi must be an integer under magnetic_periodic");
  }
}

double bump_profile(double r, double radius) {
  if (r >= radius) return 0.0;
  const double t = 1.0 - (r * r) / (radius * radius);
  return t * t * t;
}

namespace {

std::vector<double> evaluate_potential(const ModelConfig& config, const std::vector<double>& params) {
  const Grid g = config.grid();
  std::vector<double> v(g.sites(), 0.0);
  const auto& pot = config.potential;
  if (pot.kind == PotentialKind::none || pot.amplitude == 0.0) return v;

  if (pot.kind == PotentialKind::quasi_periodic) {
    for (std::size_t s = 0; s < g.sites(); ++s)
      for (std::size_t m = 0; m < pot.wavevectors.size(); ++m) {
        double phase = params[m];
        for (int k = 0; k < g.dim; ++k) phase += pot.wavevectors[m][k] * g.position(s, k);
        v[s] += pot.amplitude * std::cos(phase);
      }
    return v;
  }

  // One bump per unit cell, centered on the lattice sites.
  const int reach = int(std::ceil(pot.bump_radius / g.spacing));
  for (std::size_t s = 0; s < g.sites(); ++s) {
    const double lambda = params[s];
    if (lambda == 0.0) continue;
    const Coord c = g.coords(s);
    Coord off{0, 0, 0};
    const int lo[3] = {-reach, g.dim > 1 ? -reach : 0, g.dim > 2 ? -reach : 0};
    const int hi[3] = {reach, g.dim > 1 ? reach : 0, g.dim > 2 ? reach : 0};
    for (off[2] = lo[2]; off[2] <= hi[2]; ++off[2])
      for (off[1] = lo[1]; off[1] <= hi[1]; ++off[1])
        for (off[0] = lo[0]; off[0] <= hi[0]; ++off[0]) {
          Coord t = c;
          bool inside = true;
          double r2 = 0.0;
          for (int k = 0; k < g.dim; ++k) {
            int v2 = t[k] + off[k];
            if (v2 < 0 || v2 >= g.extent[k]) {
              if (!g.periodic[k]) { inside = false; break; }
              v2 = ((v2 % g.extent[k]) + g.extent[k]) % g.extent[k];
            }
            t[k] = v2;
            r2 += double(off[k]) * off[k];
          }
          if (!inside) continue;
          // Periodic axes shorter than the bump support would alias; n >= 4 and R ~ a keep this out.
          v[g.site_index(t)] += lambda * bump_profile(std::sqrt(r2) * g.spacing, pot.bump_radius);
        }
  }
  return v;
}

}  // namespace

DisorderSample sample_disorder(const ModelConfig& config, std::uint64_t seed) {
  DisorderSample s;
  s.omega_id = seed;
  const Grid g = config.grid();
  std::mt19937_64 rng(seed);
  switch (config.potential.kind) {
    case PotentialKind::none: break;
    case PotentialKind::random_bumps: {
      std::uniform_real_distribution<double> dist(-config.potential.amplitude, config.potential.amplitude);
      s.parameters.resize(g.sites());
      for (auto& x : s.parameters) x = config.potential.amplitude > 0.0 ? dist(rng) : 0.0;
      break;
    }
    case PotentialKind::quasi_periodic: {
      std::uniform_real_distribution<double> dist(0.0, two_pi);
      s.parameters.resize(config.potential.wavevectors.size());
      for (auto& x : s.parameters) x = dist(rng);
      break;
    }
  }
  s.potential_values = evaluate_potential(config, s.parameters);
  return s;
}

DisorderSample translate_sample(const ModelConfig& config, const DisorderSample& sample, const Point& shift) {
  const Grid g = config.grid();
  Coord steps{0, 0, 0};
  for (int k = 0; k < g.dim; ++k) {
    const double q = shift[k] / g.spacing;
    if (!near_integer(q, 1e-12)) throw std::invalid_argument("translate_sample: shift is not a lattice vector");
    steps[k] = int(std::lround(q));
  }
  DisorderSample out = sample;
  switch (config.potential.kind) {
    case PotentialKind::none: break;
    case PotentialKind::random_bumps:
      // bump at x moves to x + a, cyclically on the hull
      for (std::size_t s = 0; s < g.sites(); ++s) {
        Coord c = g.coords(s);
        for (int k = 0; k < g.dim; ++k) c[k] = ((c[k] + steps[k]) % g.extent[k] + g.extent[k]) % g.extent[k];
        out.parameters[g.site_index(c)] = sample.parameters[s];
      }
      break;
    case PotentialKind::quasi_periodic:
      for (std::size_t m = 0; m < out.parameters.size(); ++m)
        for (int k = 0; k < g.dim; ++k) out.parameters[m] -= config.potential.wavevectors[m][k] * shift[k];
      break;
  }
  out.potential_values = evaluate_potential(config, out.parameters);
  return out;
}

namespace {

// Link phase phi for the hop x -> x + a e_axis; H(x + a e_axis, x) = -exp(i phi) / a^2.
// Open boxes use the symmetric gauge about the box center. Any periodic axis switches to a
// Landau gauge A_j = -sum_{k>j} B_jk u_k (u_k = c_k a, uncentered), plus a seam phase
// B_jk L_k u_j on the wrap link of axis k. Every plaquette then carries flux B_jk a^2, and
// the wrap corners close modulo 2pi exactly when the flux is quantized.
double link_phase(const ModelConfig& cfg, const Grid& g, std::size_t site, int axis, bool wraps, int sign) {
  const Coord c = g.coords(site);
  const double a = g.spacing;
  double phi = 0.0;
  const bool any_periodic = g.periodic[0] || g.periodic[1] || g.periodic[2];
  if (!any_periodic) {
    for (int k = 0; k < g.dim; ++k)
      if (k != axis) phi += -0.5 * a * cfg.field[axis][k] * g.position(site, k);
  } else {
    for (int k = axis + 1; k < g.dim; ++k) phi += -a * cfg.field[axis][k] * (c[k] * a);
    if (wraps)
      for (int j = 0; j < axis; ++j) phi += cfg.field[j][axis] * g.length(axis) * (c[j] * a);
  }
  return sign * phi;
}

arma::cx_mat assemble_hopping(const ModelConfig& cfg, const Grid& g) {
  const std::size_t n = g.size();
  const double t = 1.0 / (g.spacing * g.spacing);
  arma::cx_mat h(n, n, arma::fill::zeros);
  for (std::size_t s = 0; s < g.sites(); ++s) {
    const Coord c = g.coords(s);
    for (int axis = 0; axis < g.dim; ++axis) {
      std::size_t nb;
      if (!g.neighbor(s, axis, +1, nb)) continue;
      const bool wraps = c[axis] + 1 == g.extent[axis];
      for (int q = 0; q < g.dofs; ++q) {
        const double phi = link_phase(cfg, g, s, axis, wraps, field_sign(cfg, q));
        const std::complex<double> hop = -t * std::polar(1.0, phi);
        const std::size_t from = s * g.dofs + q, to = nb * g.dofs + q;
        h(to, from) += hop;
        h(from, to) += std::conj(hop);
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) h(i, i) += 2.0 * g.dim * t;
  return h;
}

OperatorKernel assemble(const ModelConfig& cfg, const DisorderSample& sample) {
  cfg.validate();
  const Grid g = cfg.grid();
  OperatorKernel k;
  k.grid = g;
  k.matrix = assemble_hopping(cfg, g);
  const bool have_v = sample.potential_values.size() == g.sites();
  if (!have_v && !sample.potential_values.empty())
    throw std::invalid_argument("disorder sample does not match the grid");
  for (std::size_t s = 0; s < g.sites(); ++s) {
    const Coord c = g.coords(s);
    const int parity = (c[0] + c[1] + c[2]) % 2 == 0 ? 1 : -1;
    const double v = (have_v ? sample.potential_values[s] : 0.0) + cfg.staggered * parity;
    for (int q = 0; q < g.dofs; ++q) k.matrix(s * g.dofs + q, s * g.dofs + q) += v + onsite(cfg, q);
  }
  return k;
}

}  // namespace

OperatorKernel build_bulk_hamiltonian(const ModelConfig& config, const DisorderSample& sample) {
  if (config.boundary == Boundary::dirichlet_last_axis)
    throw ConfigError("bulk Hamiltonian needs magnetic_periodic or dirichlet_all boundary");
  return assemble(config, sample);
}

OperatorKernel build_edge_hamiltonian(const ModelConfig& config, const DisorderSample& sample) {
  if (config.boundary != Boundary::dirichlet_last_axis)
    throw ConfigError("edge Hamiltonian needs dirichlet_last_axis boundary");
  return assemble(config, sample);
}

OperatorKernel build_kinetic(const ModelConfig& config) {
  config.validate();
  OperatorKernel k;
  k.grid = config.grid();
  k.matrix = assemble_hopping(config, k.grid);
  return k;
}

MagneticTranslation::MagneticTranslation(const ModelConfig& config, const Coord& shift_sites) {
  const Grid g = config.grid();
  for (int k = 0; k < g.dim; ++k)
    if (!g.periodic[k]) throw ConfigError("magnetic translation needs periodic axes");
  const std::size_t n = g.size();
  const arma::cx_mat h = assemble_hopping(config, g);

  auto shifted = [&](std::size_t idx, int sign) {
    const std::size_t s = idx / g.dofs;
    Coord c = g.coords(s);
    for (int k = 0; k < g.dim; ++k)
      c[k] = ((c[k] + sign * shift_sites[k]) % g.extent[k] + g.extent[k]) % g.extent[k];
    return g.site_index(c) * g.dofs + idx % g.dofs;
  };

  // D on the image index x, solved along links by breadth-first search.
  std::vector<std::complex<double>> d(n, 0.0);
  std::vector<bool> seen(n, false);
  for (std::size_t root = 0; root < n; ++root) {
    if (seen[root]) continue;
    seen[root] = true;
    d[root] = 1.0;
    std::queue<std::size_t> todo;
    todo.push(root);
    while (!todo.empty()) {
      const std::size_t x = todo.front();
      todo.pop();
      const std::size_t xs = shifted(x, -1);
      for (std::size_t y = 0; y < n; ++y) {
        if (y == x || h(x, y) == 0.0) continue;
        const std::complex<double> moved = h(xs, shifted(y, -1));
        if (std::abs(moved) == 0.0) throw std::logic_error("magnetic translation: stencil is not shift invariant");
        const std::complex<double> dy = std::conj(h(x, y) / (d[x] * moved));
        if (!seen[y]) {
          seen[y] = true;
          d[y] = dy / std::abs(dy);
          todo.push(y);
        } else if (std::abs(d[y] - dy / std::abs(dy)) > 1e-9) {
          throw ConfigError("magnetic translation does not close: shift_k * flux_quanta(j, k) must be a multiple of sites(j)");
        }
      }
    }
  }

  target_.resize(n);
  phase_.resize(n);
  for (std::size_t y = 0; y < n; ++y) {
    target_[y] = shifted(y, +1);
    phase_[y] = d[target_[y]];
  }
}

arma::cx_mat MagneticTranslation::conjugate(const arma::cx_mat& a) const {
  const std::size_t n = target_.size();
  arma::cx_mat out(n, n);
  for (std::size_t c = 0; c < n; ++c)
    for (std::size_t r = 0; r < n; ++r)
      out(target_[r], target_[c]) = phase_[r] * a(r, c) * std::conj(phase_[c]);
  return out;
}

arma::cx_mat MagneticTranslation::matrix() const {
  const std::size_t n = target_.size();
  arma::cx_mat u(n, n, arma::fill::zeros);
  for (std::size_t y = 0; y < n; ++y) u(target_[y], y) = phase_[y];
  return u;
}

std::string to_string(Boundary b) {
  switch (b) {
    case Boundary::magnetic_periodic: return "magnetic_periodic";
    case Boundary::dirichlet_all: return "dirichlet_all";
    case Boundary::dirichlet_last_axis: return "dirichlet_last_axis";
  }
  return "?";
}

std::string to_string(PotentialKind k) {
  switch (k) {
    case PotentialKind::none: return "none";
    case PotentialKind::quasi_periodic: return "quasi_periodic";
    case PotentialKind::random_bumps: return "random_bumps";
  }
  return "?";
}

Boundary boundary_from_string(const std::string& s) {
  if (s == "magnetic_periodic") return Boundary::magnetic_periodic;
  if (s == "dirichlet_all") return Boundary::dirichlet_all;
  if (s == "dirichlet_last_axis") return Boundary::dirichlet_last_axis;
  throw ConfigError("unknown boundary '" + s + "'");
}

PotentialKind potential_from_string(const std::string& s) {
  if (s == "none") return PotentialKind::none;
  if (s == "quasi_periodic") return PotentialKind::quasi_periodic;
  if (s == "random_bumps") return PotentialKind::random_bumps;
  throw ConfigError("unknown potential kind '" + s + "'");
}

}  // namespace nctopo
