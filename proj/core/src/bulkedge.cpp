#include "nctopo/bulkedge.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "nctopo/config.hpp"
#include "nctopo/parallel.hpp"

namespace nctopo {

namespace {

SpectralData spectrum(const OperatorKernel& h, std::uint64_t hash, const EigenCache* cache) {
  return cache ? cache->get_or_compute(h, hash) : diagonalize(h, hash);
}

// Sites with the transverse coordinate in the upper half and the along-edge coordinate
// in the centered core block.
std::vector<std::size_t> edge_window_sites(const Grid& g, const TraceWindow& w) {
  if (g.dim < 2) throw std::invalid_argument("edge_trace: needs dimension >= 2");
  const int last = g.dim - 1;
  const int n_along = g.extent[0];
  const int keep = std::max(1, int(std::lround(w.core_fraction * n_along)));
  const int lo = (n_along - keep) / 2;
  std::vector<std::size_t> out;
  for (std::size_t s = 0; s < g.sites(); ++s) {
    const Coord c = g.coords(s);
    if (c[0] < lo || c[0] >= lo + keep) continue;
    if (2 * c[last] < g.extent[last]) continue;
    out.push_back(s);
  }
  return out;
}

}  // namespace

EdgeUnitary edge_unitary(const SpectralData& edge, const SwitchFunction& f_exp, const SpectralData* bulk) {
  if (f_exp.kind() != SwitchKind::exp) throw std::invalid_argument("edge_unitary: needs an exp-kind switch");
  if (bulk) {
    const arma::uvec inside = arma::find(bulk->eigenvalues >= f_exp.lower() && bulk->eigenvalues <= f_exp.upper());
    if (!inside.is_empty())
      throw std::domain_error("edge_unitary: bulk spectrum intersects the switch interval (" +
                              std::to_string(inside.n_elem) + " eigenvalues)");
  }
  EdgeUnitary u;
  u.matrix = edge.apply([&](double l) { return std::polar(1.0, 2.0 * std::numbers::pi * f_exp(l)); });
  u.gap_lo = f_exp.lower();
  u.gap_hi = f_exp.upper();
  u.grid = edge.grid;
  return u;
}

arma::cx_mat chiral_edge_projection(const SpectralData& edge, const arma::cx_mat& chiral, const SwitchFunction& f_ind) {
  if (f_ind.kind() != SwitchKind::ind) throw std::invalid_argument("chiral_edge_projection: needs an ind-kind switch");
  if (chiral.n_rows != edge.eigenvectors.n_rows || !chiral.is_square())
    throw std::invalid_argument("chiral_edge_projection: chirality operator has the wrong shape");
  const arma::cx_mat half =
      edge.apply([&](double l) { return std::polar(1.0, -0.5 * std::numbers::pi * f_ind(l)); });
  const arma::cx_mat id = arma::eye<arma::cx_mat>(chiral.n_rows, chiral.n_cols);
  // conjugation by the unitary; the same phase on both sides would give (e^{-i pi f} + R_c) / 2
  return half * (0.5 * (id + chiral)) * half.t();
}

double edge_trace(const EdgeUnitary& u, const TraceWindow& w) {
  const Grid& g = u.grid;
  if (g.dim < 2 || !g.periodic[0] || g.periodic[g.dim - 1])
    throw std::invalid_argument("edge_trace: needs a strip periodic along axis 0 and open along the last axis");
  const arma::cx_mat comm = position_commutator(u.matrix, g, 0);
  const auto sites = edge_window_sites(g, w);
  std::complex<double> sum = 0.0;
  for (auto s : sites)
    for (int q = 0; q < g.dofs; ++q) {
      const std::size_t i = s * g.dofs + q;
      sum += arma::cdot(u.matrix.col(i), comm.col(i));
    }
  const int keep = std::max(1, int(std::lround(w.core_fraction * g.extent[0])));
  return sum.real() / (double(keep) * g.spacing);
}

InvariantResult edge_winding(const EdgeUnitary& u, const TraceWindow& w) {
  InvariantResult r;
  r.method = Method::edge_winding;
  r.value = odd_constant(1) * edge_trace(u, w);
  r.window = w;
  return r;
}

BulkEdgeReport bulk_edge_check(const BulkEdgeSetup& setup, std::span<const std::uint64_t> seeds, int threads,
                               const EigenCache* cache) {
  if (setup.bulk.boundary != Boundary::dirichlet_all)
    throw std::invalid_argument("bulk_edge_check: bulk model must use dirichlet_all");
  if (setup.edge.boundary != Boundary::dirichlet_last_axis)
    throw std::invalid_argument("bulk_edge_check: edge model must use dirichlet_last_axis");
  const SwitchFunction f_exp(SwitchKind::exp, setup.gap_center, setup.gap_half_width);

  // The bulk gap is checked on the torus version of the bulk model when its flux is quantized.
  std::optional<ModelConfig> torus = setup.bulk;
  torus->boundary = Boundary::magnetic_periodic;
  try {
    torus->validate();
  } catch (const ConfigError&) {
    torus.reset();
  }

  BulkEdgeReport rep;
  rep.rows.resize(seeds.size());
  parallel_for(seeds.size(), threads, [&](std::size_t i) {
    BulkEdgeRow& row = rep.rows[i];
    row.seed = seeds[i];

    const auto bulk_sample = sample_disorder(setup.bulk, seeds[i]);
    const auto bulk_sd = spectrum(build_bulk_hamiltonian(setup.bulk, bulk_sample), source_hash(setup.bulk, seeds[i]), cache);
    const Projection p = fermi_projection(bulk_sd, setup.mu);
    row.chern = even_chern(p, setup.bulk_window);
    try {
      row.fredholm = fredholm_index(p, setup.fredholm).index;
    } catch (const AmbiguousIndex& e) {
      row.fredholm_error = e.what();
    }

    std::optional<SpectralData> torus_sd;
    if (torus)
      torus_sd = spectrum(build_bulk_hamiltonian(*torus, sample_disorder(*torus, seeds[i])),
                          source_hash(*torus, seeds[i]), cache);
    const auto edge_sample = sample_disorder(setup.edge, seeds[i]);
    const auto edge_sd = spectrum(build_edge_hamiltonian(setup.edge, edge_sample), source_hash(setup.edge, seeds[i]), cache);
    const EdgeUnitary u = edge_unitary(edge_sd, f_exp, torus_sd ? &*torus_sd : nullptr);
    row.edge_trace = edge_trace(u, setup.edge_window);
    row.edge = edge_winding(u, setup.edge_window);
    row.discrepancy = std::abs(row.chern.real() + row.edge.real());
  });

  for (const auto& row : rep.rows) {
    rep.max_discrepancy = std::max(rep.max_discrepancy, row.discrepancy);
    const auto& first = rep.rows.front();
    if (std::lround(row.chern.real()) != std::lround(first.chern.real()) || row.fredholm != first.fredholm)
      rep.integers_constant = false;
  }
  return rep;
}

ProbeReport edge_delocalization_probe(const ModelConfig& edge, double gap_lo, double gap_hi,
                                      const std::vector<double>& layer_amplitudes, int layer_depth,
                                      std::span<const std::uint64_t> seeds, int threads) {
  if (edge.boundary != Boundary::dirichlet_last_axis)
    throw std::invalid_argument("edge_delocalization_probe: needs a dirichlet_last_axis strip");
  if (layer_depth < 1) throw std::invalid_argument("edge_delocalization_probe: layer depth must be positive");
  if (seeds.empty()) throw std::invalid_argument("edge_delocalization_probe: no samples");
  if (!(gap_lo < gap_hi)) throw std::invalid_argument("edge_delocalization_probe: empty energy window");

  const Grid g = edge.grid();
  const int last = g.dim - 1;
  const int n_last = g.extent[last];
  const int n_along = g.extent[0];
  const int band = std::max(1, n_last / 4);

  ProbeReport rep;
  for (std::size_t a = 0; a < layer_amplitudes.size(); ++a) {
    const double amp = layer_amplitudes[a];
    struct Partial {
      double states = 0, participation = 0, weight = 0;
    };
    std::vector<Partial> parts(seeds.size());
    parallel_for(seeds.size(), threads, [&](std::size_t i) {
      OperatorKernel h = build_edge_hamiltonian(edge, sample_disorder(edge, seeds[i]));
      std::seed_seq seq{std::uint64_t(seeds[i]), std::uint64_t(a), std::uint64_t(0x6c61796572ULL)};
      std::mt19937_64 rng(seq);
      std::uniform_real_distribution<double> dist(-amp, amp);
      for (std::size_t s = 0; s < g.sites(); ++s) {
        const int c = g.coords(s)[last];
        if (c >= layer_depth && c < n_last - layer_depth) continue;
        const double v = dist(rng);
        for (int q = 0; q < g.dofs; ++q) h.matrix(s * g.dofs + q, s * g.dofs + q) += v;
      }
      const SpectralData sd = diagonalize(h);
      const arma::uvec inside = arma::find(sd.eigenvalues >= gap_lo && sd.eigenvalues <= gap_hi);
      Partial& out = parts[i];
      out.states = double(inside.n_elem);
      for (auto k : inside) {
        const arma::vec dens = arma::square(arma::abs(sd.eigenvectors.col(k)));
        std::vector<double> along(n_along, 0.0);
        double near_edge = 0.0;
        for (std::size_t s = 0; s < g.sites(); ++s) {
          const Coord c = g.coords(s);
          double m = 0.0;
          for (int q = 0; q < g.dofs; ++q) m += dens(s * g.dofs + q);
          along[c[0]] += m;
          if (c[last] < band || c[last] >= n_last - band) near_edge += m;
        }
        double ipr = 0.0;
        for (double m : along) ipr += m * m;
        out.participation += (1.0 / ipr) / n_along;
        out.weight += near_edge;
      }
      if (inside.n_elem) {
        out.participation /= double(inside.n_elem);
        out.weight /= double(inside.n_elem);
      }
    });
    ProbeRow row;
    row.layer_amplitude = amp;
    int with_states = 0;
    for (const auto& p : parts) {
      row.in_gap_states += p.states;
      if (p.states > 0) {
        ++with_states;
        row.participation_fraction += p.participation;
        row.edge_weight += p.weight;
      }
    }
    row.in_gap_states /= double(parts.size());
    if (with_states) {
      row.participation_fraction /= with_states;
      row.edge_weight /= with_states;
    }
    rep.rows.push_back(row);
  }
  return rep;
}

}  // namespace nctopo
