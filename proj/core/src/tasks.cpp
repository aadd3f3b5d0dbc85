#include "tasks.hpp"

#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <random>

#include "nctopo/bulkedge.hpp"
#include "nctopo/clifford.hpp"
#include "nctopo/invariants.hpp"
#include "nctopo/parallel.hpp"
#include "nctopo/sobolev_loc.hpp"

namespace nctopo::detail {

namespace {

std::set<std::string> with_model(std::initializer_list<std::string> extra) {
  std::set<std::string> keys = model_keys();
  keys.insert(extra.begin(), extra.end());
  return keys;
}

bool flag(const FlatConfig& cfg, const std::string& key, bool fallback) {
  if (!cfg.has(key)) return fallback;
  const auto v = cfg.text(key);
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError("key '" + key + "': expected true or false, got '" + v + "'");
}

double positive(const FlatConfig& cfg, const std::string& key) {
  const double v = cfg.real(key);
  if (!(v > 0.0)) throw ConfigError("key '" + key + "' must be positive");
  return v;
}

double fraction(const FlatConfig& cfg, const std::string& key, double fallback) {
  const double v = cfg.real_or_none(key).value_or(fallback);
  if (!(v > 0.0 && v <= 1.0)) throw ConfigError("key '" + key + "' must lie in (0, 1]");
  return v;
}

std::vector<TraceWindow> windows(const FlatConfig& cfg) {
  const auto fractions = cfg.has("core_fractions") ? cfg.reals("core_fractions") : std::vector<double>{0.5};
  if (fractions.empty()) throw ConfigError("core_fractions must not be empty");
  const long margin = cfg.integer_or_none("window_margin").value_or(0);
  if (margin < 0) throw ConfigError("window_margin must be nonnegative");
  std::vector<TraceWindow> out;
  for (double f : fractions) {
    if (!(f > 0.0 && f <= 1.0)) throw ConfigError("core_fractions entries must lie in (0, 1]");
    out.push_back({f, int(margin)});
  }
  return out;
}

ModelConfig box_model(const FlatConfig& cfg, const std::string& task) {
  ModelConfig m = model_from_config(cfg);
  if (m.dim != 2) throw ConfigError(task + " needs dimension 2");
  if (m.boundary != Boundary::dirichlet_all) throw ConfigError(task + " needs boundary dirichlet_all");
  return m;
}

void require_samples(int samples, int minimum, const std::string& task) {
  if (samples < minimum)
    throw ConfigError(task + " needs samples >= " + std::to_string(minimum) + " (got " + std::to_string(samples) + ")");
}

SpectralData spectrum(const ModelConfig& m, std::uint64_t seed, const EigenCache* cache, bool edge = false) {
  const auto sample = sample_disorder(m, seed);
  const OperatorKernel h = edge ? build_edge_hamiltonian(m, sample) : build_bulk_hamiltonian(m, sample);
  const auto hash = source_hash(m, seed);
  return cache ? cache->get_or_compute(h, hash) : diagonalize(h, hash);
}

std::vector<SpectralData> ensemble(const TaskContext& ctx, const ModelConfig& m) {
  const auto seeds = ctx.spec.seeds();
  std::vector<SpectralData> out(seeds.size());
  parallel_for(seeds.size(), ctx.spec.threads, [&](std::size_t i) { out[i] = spectrum(m, seeds[i], ctx.cache); });
  return out;
}

/// Runs `f(seed)` per sample on the worker pool and concatenates the rows in seed order.
template <class F>
std::vector<LedgerRow> per_sample(const TaskContext& ctx, F&& f) {
  const auto seeds = ctx.spec.seeds();
  std::vector<std::vector<LedgerRow>> slots(seeds.size());
  parallel_for(seeds.size(), ctx.spec.threads, [&](std::size_t i) {
    slots[i] = f(seeds[i]);
    for (auto& r : slots[i]) r.seed = seeds[i];
  });
  std::vector<LedgerRow> out;
  for (auto& s : slots) std::move(s.begin(), s.end(), std::back_inserter(out));
  return out;
}

/// Ensemble mean of the real parts of matching rows, with the standard error of the mean.
LedgerRow ensemble_mean(const std::vector<LedgerRow>& rows, const std::string& method, const TraceWindow& w,
                        std::uint64_t seed) {
  std::vector<std::complex<double>> vals;
  for (const auto& r : rows)
    if (r.method == method && r.window && r.window->core_fraction == w.core_fraction && !r.label("aggregate"))
      vals.push_back(r.value);
  LedgerRow out;
  out.seed = seed;
  out.method = method;
  out.window = w;
  out.labels.push_back({"aggregate", "ensemble_mean"});
  out.samples = int(vals.size());
  if (vals.empty()) return out;
  std::complex<double> mean = 0.0;
  for (auto v : vals) mean += v;
  mean /= double(vals.size());
  double var = 0.0;
  for (auto v : vals) var += std::norm(v - mean);
  out.value = mean;
  out.standard_error = vals.size() > 1 ? std::sqrt(var / double(vals.size() - 1) / double(vals.size())) : 0.0;
  out.integer = std::lround(mean.real());
  return out;
}

LedgerRow fredholm_row(const Projection& p, const FredholmOptions& opt = {}) {
  LedgerRow r;
  r.method = to_string(Method::fredholm_kernel);
  r.window = opt.bulk;
  try {
    const IndexReport rep = fredholm_index(p, opt);
    r.value = double(rep.index);
    r.integer = rep.index;
    r.metrics = {{"kernel", double(rep.kernel)},
                 {"cokernel", double(rep.cokernel)},
                 {"gap_ratio", rep.gap_ratio},
                 {"threshold", rep.threshold}};
  } catch (const AmbiguousIndex& e) {
    r.value = std::numeric_limits<double>::quiet_NaN();
    r.labels.push_back({"error", e.what()});
  }
  return r;
}

void add_profile(Table& t, const std::vector<std::string>& prefix, const DecayProfile& prof) {
  for (std::size_t i = 0; i < prof.distance.size(); ++i) {
    auto line = prefix;
    line.push_back(format_real(prof.distance[i]));
    line.push_back(format_real(prof.mean[i]));
    line.push_back(std::to_string(prof.count[i]));
    t.rows.push_back(std::move(line));
  }
}

void add_fit_metrics(LedgerRow& r, const DecayFit& fit) {
  r.value = fit.rate;
  r.labels.push_back({"verdict", fit.verdict()});
  r.metrics.push_back({"rate_ci", fit.rate_ci});
  r.metrics.push_back({"r_squared", fit.r_squared});
  r.metrics.push_back({"r_min", fit.r_min});
  r.metrics.push_back({"r_max", fit.r_max});
  r.metrics.push_back({"box_length", fit.box_length});
  r.metrics.push_back({"super_exponential", fit.super_exponential ? 1.0 : 0.0});
}

arma::cx_mat per_site(std::size_t sites, const arma::cx_mat& local) {
  return arma::kron(arma::eye<arma::cx_mat>(sites, sites), local);
}

// ---- bulk-chern

struct BulkChern {
  ModelConfig model;
  double mu = 0.0;
  std::vector<TraceWindow> windows;

  static BulkChern parse(const FlatConfig& cfg) {
    return {box_model(cfg, "bulk-chern"), cfg.real("mu"), nctopo::detail::windows(cfg)};
  }
};

TaskOutput run_bulk_chern(const TaskContext& ctx) {
  const auto p = BulkChern::parse(ctx.spec.config);
  TaskOutput out;
  out.rows = per_sample(ctx, [&](std::uint64_t seed) {
    const auto sd = spectrum(p.model, seed, ctx.cache);
    const Projection proj = fermi_projection(sd, p.mu);
    auto stamp = [&](LedgerRow r) {
      r.metrics.push_back({"gap_distance", proj.gap_distance});
      r.metrics.push_back({"rank", double(proj.rank)});
      return r;
    };
    std::vector<LedgerRow> rows;
    for (const auto& w : p.windows) rows.push_back(stamp(row_from(even_chern(proj, w))));
    rows.push_back(stamp(fredholm_row(proj)));
    LedgerRow k;
    k.method = to_string(Method::kitaev_triple);
    const double v = kitaev_triple(proj, kitaev_sectors(proj.grid, p.windows.front()));
    k.value = v;
    k.integer = std::lround(v);
    k.window = p.windows.front();
    rows.push_back(stamp(std::move(k)));
    return rows;
  });
  for (const auto& w : p.windows)
    out.rows.push_back(ensemble_mean(out.rows, to_string(Method::cyclic_even), w, ctx.spec.base_seed));
  return out;
}

// ---- odd-chern

struct OddChern {
  Grid grid;
  std::vector<long> windings;
  double phase_disorder = 0.0;
  std::vector<TraceWindow> windows;

  static OddChern parse(const FlatConfig& cfg) {
    OddChern o;
    const long n = cfg.integer("sites");
    if (n < 2) throw ConfigError("odd-chern needs sites >= 2");
    ModelConfig ring;
    ring.dim = 1;
    ring.spacing = positive(cfg, "spacing");
    ring.sites_per_axis = {int(n), 0, 0};
    ring.box_length = double(n) * ring.spacing;
    ring.boundary = Boundary::magnetic_periodic;
    ring.validate();
    o.grid = ring.grid();
    o.windings = cfg.integers("winding");
    if (o.windings.empty()) throw ConfigError("winding must list at least one integer");
    o.phase_disorder = cfg.real("phase_disorder");
    if (o.phase_disorder < 0.0) throw ConfigError("phase_disorder must be nonnegative");
    o.windows = nctopo::detail::windows(cfg);
    return o;
  }
};

TaskOutput run_odd_chern(const TaskContext& ctx) {
  const auto p = OddChern::parse(ctx.spec.config);
  const long n = long(p.grid.sites());
  TaskOutput out;
  out.rows = per_sample(ctx, [&](std::uint64_t seed) {
    // U = D S^k D^*, D a random diagonal phase; (S psi)(x) = psi(x - 1)
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-p.phase_disorder, p.phase_disorder);
    std::vector<std::complex<double>> d(n);
    for (auto& z : d) z = std::polar(1.0, p.phase_disorder > 0.0 ? dist(rng) : 0.0);
    std::vector<LedgerRow> rows;
    for (long k : p.windings) {
      arma::cx_mat u(n, n, arma::fill::zeros);
      for (long x = 0; x < n; ++x) {
        const long y = ((x + k) % n + n) % n;
        u(y, x) = d[y] * std::conj(d[x]);
      }
      const auto cu = ChiralUnitary::on_grid(std::move(u), p.grid);
      for (const auto& w : p.windows) {
        LedgerRow r = row_from(odd_chern(cu, w));
        r.integer = std::lround(r.value.real());
        r.labels.push_back({"winding", std::to_string(k)});
        rows.push_back(std::move(r));
      }
    }
    return rows;
  });
  return out;
}

// ---- mod2-index

struct Mod2 {
  ModelConfig model;
  double mu = 0.0;
  bool conserved_spin = false;

  static Mod2 parse(const FlatConfig& cfg) {
    Mod2 m{box_model(cfg, "mod2-index"), cfg.real("mu"), flag(cfg, "conserved_spin", false)};
    if (m.model.dofs != 2) throw ConfigError("mod2-index needs internal_dofs 2 (time reversal acts as i sigma_y per site)");
    return m;
  }
};

TaskOutput run_mod2(const TaskContext& ctx) {
  const auto p = Mod2::parse(ctx.spec.config);
  const std::size_t sites = p.model.grid().sites();
  const arma::cx_mat i_sigma_y{{{0.0, 0.0}, {1.0, 0.0}}, {{-1.0, 0.0}, {0.0, 0.0}}};
  const arma::cx_mat sigma_z{{{1.0, 0.0}, {0.0, 0.0}}, {{0.0, 0.0}, {-1.0, 0.0}}};
  const AntiUnitary rt{per_site(sites, i_sigma_y)};
  const arma::cx_mat spin = p.conserved_spin ? per_site(sites, sigma_z) : arma::cx_mat{};
  TaskOutput out;
  out.rows = per_sample(ctx, [&](std::uint64_t seed) {
    const Projection proj = fermi_projection(spectrum(p.model, seed, ctx.cache), p.mu);
    const Mod2Report rep = mod2_index(proj, rt, {}, p.conserved_spin ? &spin : nullptr);
    std::vector<LedgerRow> rows;
    LedgerRow r;
    r.method = to_string(Method::mod2);
    r.value = double(rep.bit);
    r.integer = rep.bit;
    r.metrics = {{"kernel", double(rep.kernel)},
                 {"gap_ratio", rep.counts.gap_ratio},
                 {"gap_distance", proj.gap_distance}};
    rows.push_back(std::move(r));
    if (rep.spin_index) {
      LedgerRow s;
      s.method = "spin_fredholm";
      s.value = double(*rep.spin_index);
      s.integer = *rep.spin_index;
      s.labels.push_back({"reduction_agrees", rep.reduction_agrees.value_or(false) ? "true" : "false"});
      rows.push_back(std::move(s));
    }
    return rows;
  });
  return out;
}

// ---- edge-winding

struct EdgeWinding {
  ModelConfig model;
  double gap_center = 0.0;
  std::vector<double> half_widths;
  TraceWindow window{1.0, 0};

  static EdgeWinding parse(const FlatConfig& cfg) {
    EdgeWinding e;
    e.model = model_from_config(cfg);
    if (e.model.dim != 2) throw ConfigError("edge-winding needs dimension 2");
    if (e.model.boundary != Boundary::dirichlet_last_axis)
      throw ConfigError("edge-winding needs boundary dirichlet_last_axis");
    e.gap_center = cfg.real("gap_center");
    e.half_widths = cfg.reals("gap_half_widths");
    if (e.half_widths.empty()) throw ConfigError("gap_half_widths must not be empty");
    for (double h : e.half_widths)
      if (!(h > 0.0)) throw ConfigError("gap_half_widths entries must be positive");
    e.window.core_fraction = fraction(cfg, "edge_core_fraction", 1.0);
    return e;
  }
};

TaskOutput run_edge_winding(const TaskContext& ctx) {
  const auto p = EdgeWinding::parse(ctx.spec.config);
  TaskOutput out;
  out.rows = per_sample(ctx, [&](std::uint64_t seed) {
    const auto sd = spectrum(p.model, seed, ctx.cache, true);
    std::vector<LedgerRow> rows;
    for (double hw : p.half_widths) {
      const SwitchFunction f(SwitchKind::exp, p.gap_center, hw);
      const EdgeUnitary u = edge_unitary(sd, f);
      LedgerRow r = row_from(edge_winding(u, p.window));
      r.metrics = {{"half_width", hw},
                   {"edge_trace", edge_trace(u, p.window)},
                   {"in_gap_states", double(arma::accu(sd.eigenvalues >= f.lower() && sd.eigenvalues <= f.upper()))}};
      rows.push_back(std::move(r));
    }
    return rows;
  });
  return out;
}

// ---- bulk-edge-check

BulkEdgeSetup parse_bulk_edge(const FlatConfig& cfg) {
  BulkEdgeSetup s;
  s.bulk = box_model(cfg, "bulk-edge-check");
  s.edge = s.bulk;
  const auto n = cfg.integers("edge_sites_per_axis");
  if (int(n.size()) != s.bulk.dim) throw ConfigError("edge_sites_per_axis needs one entry per axis");
  for (int k = 0; k < s.bulk.dim; ++k) {
    if (n[k] < 2) throw ConfigError("edge_sites_per_axis entries must be >= 2");
    s.edge.sites_per_axis[k] = int(n[k]);
  }
  s.edge.boundary = Boundary::dirichlet_last_axis;
  s.edge.validate();
  s.mu = cfg.real("mu");
  s.gap_center = cfg.real("gap_center");
  s.gap_half_width = positive(cfg, "gap_half_width");
  s.bulk_window = {fraction(cfg, "core_fraction", 0.5), 0};
  s.fredholm.bulk = s.bulk_window;
  s.edge_window = {fraction(cfg, "edge_core_fraction", 1.0), 0};
  return s;
}

TaskOutput run_bulk_edge(const TaskContext& ctx) {
  const BulkEdgeSetup setup = parse_bulk_edge(ctx.spec.config);
  const auto seeds = ctx.spec.seeds();
  const BulkEdgeReport rep = bulk_edge_check(setup, seeds, ctx.spec.threads, ctx.cache);
  TaskOutput out;
  Table table{"bulk_edge",
              {"seed", "chern_re", "chern_im", "fredholm", "edge_winding", "edge_trace", "discrepancy"},
              {}};
  for (const auto& b : rep.rows) {
    LedgerRow chern = row_from(b.chern);
    chern.metrics.push_back({"discrepancy", b.discrepancy});
    LedgerRow fred;
    fred.method = to_string(Method::fredholm_kernel);
    fred.window = setup.fredholm.bulk;
    if (b.fredholm) {
      fred.value = double(*b.fredholm);
      fred.integer = b.fredholm;
    } else {
      fred.value = std::numeric_limits<double>::quiet_NaN();
      fred.labels.push_back({"error", b.fredholm_error});
    }
    LedgerRow edge = row_from(b.edge);
    edge.metrics = {{"edge_trace", b.edge_trace}, {"discrepancy", b.discrepancy}};
    for (LedgerRow* r : {&chern, &fred, &edge}) {
      r->seed = b.seed;
      out.rows.push_back(std::move(*r));
    }
    table.rows.push_back({std::to_string(b.seed), format_real(b.chern.value.real()), format_real(b.chern.value.imag()),
                          b.fredholm ? std::to_string(*b.fredholm) : "", format_real(b.edge.value.real()),
                          format_real(b.edge_trace), format_real(b.discrepancy)});
  }
  LedgerRow summary;
  summary.seed = ctx.spec.base_seed;
  summary.method = "bulk_edge_summary";
  summary.value = rep.max_discrepancy;
  summary.integer = rep.integers_constant ? 1 : 0;
  summary.samples = int(rep.rows.size());
  summary.labels.push_back({"aggregate", "ensemble"});
  summary.metrics = {{"max_discrepancy", rep.max_discrepancy}};
  out.rows.push_back(std::move(summary));
  out.tables.push_back(std::move(table));
  return out;
}

// ---- sobolev-report

struct SobolevTask {
  ModelConfig model;
  double mu = 0.0;
  std::optional<FractionalMomentOptions> moments;

  static SobolevTask parse(const FlatConfig& cfg, int samples) {
    SobolevTask t{model_from_config(cfg), cfg.real("mu"), std::nullopt};
    require_samples(samples, MobilityOptions{}.min_samples, "sobolev-report");
    if (cfg.has("fm_s")) {
      FractionalMomentOptions fm;
      fm.s = cfg.real("fm_s");
      if (!(fm.s > 0.0 && fm.s < 1.0)) throw ConfigError("fm_s must lie in (0, 1)");
      fm.energy_lo = cfg.real("fm_energy_lo");
      fm.energy_hi = cfg.real("fm_energy_hi");
      if (fm.energy_hi < fm.energy_lo) throw ConfigError("fm_energy_hi must not be below fm_energy_lo");
      t.moments = fm;
    } else if (cfg.has("fm_energy_lo") || cfg.has("fm_energy_hi")) {
      throw ConfigError("fm_energy_lo / fm_energy_hi need fm_s");
    }
    return t;
  }
};

TaskOutput run_sobolev(const TaskContext& ctx) {
  const auto p = SobolevTask::parse(ctx.spec.config, ctx.spec.samples);
  const auto sds = ensemble(ctx, p.model);
  const MobilityReport rep = mobility_report(sds, p.mu);
  TaskOutput out;
  LedgerRow m;
  m.seed = ctx.spec.base_seed;
  m.method = "mobility";
  m.samples = int(sds.size());
  add_fit_metrics(m, rep.decay);
  m.labels.insert(m.labels.begin(), {"mobility_verdict", to_string(rep.verdict)});
  m.metrics.insert(m.metrics.begin(), {{"mu", rep.mu}, {"dos", rep.dos}, {"min_gap_distance", rep.min_gap_distance}});
  out.rows.push_back(std::move(m));
  for (const auto& [rp, norm] : rep.sobolev.norms) {
    LedgerRow s;
    s.seed = ctx.spec.base_seed;
    s.method = "sobolev_norm";
    s.value = norm;
    s.samples = int(sds.size());
    s.labels = {{"order", std::to_string(rp.first)},
                {"exponent", std::to_string(rp.second)},
                {"finite", rep.sobolev.finite.at(rp) ? "true" : "false"}};
    out.rows.push_back(std::move(s));
  }
  Table decay{"sobolev_report_decay", {"distance", "mean", "count"}, {}};
  add_profile(decay, {}, rep.decay.profile);
  out.tables.push_back(std::move(decay));
  if (p.moments) {
    const FractionalMomentResult fm = fractional_moment(sds, *p.moments);
    LedgerRow f;
    f.seed = ctx.spec.base_seed;
    f.method = "fractional_moment";
    f.samples = int(sds.size());
    add_fit_metrics(f, fm.fit);
    f.metrics.insert(f.metrics.begin(), {{"s", p.moments->s}, {"eta", fm.eta}, {"intercept", fm.intercept}});
    out.rows.push_back(std::move(f));
    Table t{"fractional_moment_decay", {"distance", "mean", "count"}, {}};
    add_profile(t, {}, fm.fit.profile);
    out.tables.push_back(std::move(t));
  }
  return out;
}

// ---- localization-scan

struct Scan {
  ModelConfig model;
  std::vector<double> mus;
  std::optional<ModelConfig> comparison;

  static Scan parse(const FlatConfig& cfg, int samples) {
    Scan s{model_from_config(cfg), cfg.reals("mus"), std::nullopt};
    if (s.mus.empty()) throw ConfigError("mus must not be empty");
    require_samples(samples, DecayFitOptions{}.min_samples, "localization-scan");
    if (cfg.has("comparison_sites")) {
      const long n = cfg.integer("comparison_sites");
      if (n < 2) throw ConfigError("comparison_sites must be >= 2");
      ModelConfig c = s.model;
      for (int k = 0; k < c.dim; ++k) c.sites_per_axis[k] = int(n);
      c.box_length = double(n) * c.spacing;
      c.validate();
      s.comparison = c;
    }
    return s;
  }
};

TaskOutput run_scan(const TaskContext& ctx) {
  const auto p = Scan::parse(ctx.spec.config, ctx.spec.samples);
  const auto seeds = ctx.spec.seeds();
  const bool with_index = p.model.dim == 2 && p.model.boundary == Boundary::dirichlet_all;
  TaskOutput out;
  Table decay{"localization_scan_decay", {"mu", "sites", "distance", "mean", "count"}, {}};

  std::vector<const ModelConfig*> sizes{&p.model};
  if (p.comparison) sizes.push_back(&*p.comparison);
  // fitted rate at the main size, per mu; NaN where the fit failed
  std::vector<double> main_rates(p.mus.size(), std::numeric_limits<double>::quiet_NaN());
  for (const ModelConfig* m : sizes) {
    const auto sds = ensemble(ctx, *m);
    const int n = m->sites(0);
    for (std::size_t k = 0; k < p.mus.size(); ++k) {
      const double mu = p.mus[k];
      std::vector<Projection> projs(sds.size());
      parallel_for(sds.size(), ctx.spec.threads, [&](std::size_t i) { projs[i] = fermi_projection(sds[i], mu); });
      LedgerRow r;
      r.seed = ctx.spec.base_seed;
      r.method = "kernel_decay";
      r.samples = int(projs.size());
      r.labels.push_back({"sites", std::to_string(n)});
      try {
        const DecayFit fit = kernel_decay_fit(projs);
        add_fit_metrics(r, fit);
        add_profile(decay, {format_real(mu), std::to_string(n)}, fit.profile);
        if (m == &p.model)
          main_rates[k] = fit.rate;
        else
          r.metrics.push_back({"rate_ratio", fit.rate / main_rates[k]});
      } catch (const std::domain_error& e) {
        r.value = std::numeric_limits<double>::quiet_NaN();
        r.labels.push_back({"verdict", "no decay"});
        r.labels.push_back({"error", e.what()});
      }
      r.metrics.insert(r.metrics.begin(), {"mu", mu});
      out.rows.push_back(std::move(r));

      if (with_index && m == &p.model) {
        std::vector<LedgerRow> idx(projs.size());
        parallel_for(projs.size(), ctx.spec.threads, [&](std::size_t i) {
          idx[i] = fredholm_row(projs[i]);
          idx[i].seed = seeds[i];
          idx[i].metrics.insert(idx[i].metrics.begin(), {"mu", mu});
        });
        std::move(idx.begin(), idx.end(), std::back_inserter(out.rows));
      }
    }
  }
  out.tables.push_back(std::move(decay));
  return out;
}

// ---- residue-check

struct Residue {
  int dim = 1;
  std::vector<double> s_values;
  double weight = 0.0;
  ResidueOptions opt;

  static Residue parse(const FlatConfig& cfg) {
    Residue r;
    r.dim = int(cfg.integer("dimension"));
    if (r.dim < 1 || r.dim > 3) throw ConfigError("dimension must be 1, 2 or 3");
    r.s_values = cfg.reals("s_values");
    if (r.s_values.empty()) throw ConfigError("s_values must not be empty");
    for (double s : r.s_values)
      if (!(s > r.dim)) throw ConfigError("s_values entries must exceed the dimension (zeta diverges at s <= d)");
    r.weight = cfg.real("weight");
    if (cfg.has("lattice_spacing")) r.opt.spacing = positive(cfg, "lattice_spacing");
    if (cfg.has("radius")) r.opt.radius = positive(cfg, "radius");
    return r;
  }
};

TaskOutput run_residue(const TaskContext& ctx) {
  const auto p = Residue::parse(ctx.spec.config);
  const ResidueReport rep = residue_check(p.dim, p.s_values, p.weight, p.opt);
  TaskOutput out;
  for (const auto& pt : rep.points) {
    LedgerRow r;
    r.seed = ctx.spec.base_seed;
    r.method = "zeta";
    r.value = pt.lattice;
    r.metrics = {{"s", pt.s}, {"closed_form", pt.closed_form}, {"rel_dev", pt.rel_dev}};
    out.rows.push_back(std::move(r));
  }
  LedgerRow res;
  res.seed = ctx.spec.base_seed;
  res.method = "residue";
  res.value = rep.residue_estimate;
  res.metrics = {{"expected", rep.residue_expected}, {"rel_dev", rep.residue_rel_dev}};
  out.rows.push_back(std::move(res));
  return out;
}

// ---- hs-check

struct HsTask {
  Grid grid;
  CompactKernel kernel;
  double s = 0.0;
  double twist = 0.0;

  static HsTask parse(const FlatConfig& cfg) {
    HsTask t;
    ModelConfig m;
    m.dim = int(cfg.integer("dimension"));
    if (m.dim < 1 || m.dim > 3) throw ConfigError("dimension must be 1, 2 or 3");
    const long n = cfg.integer("sites");
    if (n < 2) throw ConfigError("hs-check needs sites >= 2");
    m.spacing = positive(cfg, "spacing");
    for (int k = 0; k < m.dim; ++k) m.sites_per_axis[k] = int(n);
    m.box_length = double(n) * m.spacing;
    m.boundary = Boundary::dirichlet_all;
    m.validate();
    t.grid = m.grid();
    t.s = cfg.real("hs_exponent");
    if (!(t.s > m.dim)) throw ConfigError("hs_exponent must exceed the dimension");
    t.twist = cfg.real_or_none("twist").value_or(0.0);
    if (t.twist != 0.0 && m.dim < 2) throw ConfigError("twist needs dimension >= 2");

    const auto offsets = cfg.integers("kernel_offsets");
    const auto re = cfg.reals("kernel_values");
    const auto im = cfg.has("kernel_values_imag") ? cfg.reals("kernel_values_imag") : std::vector<double>(re.size(), 0.0);
    if (offsets.size() != re.size() * std::size_t(m.dim))
      throw ConfigError("kernel_offsets must list dimension-many integers per kernel value");
    if (im.size() != re.size()) throw ConfigError("kernel_values_imag needs one entry per kernel value");
    for (std::size_t i = 0; i < re.size(); ++i) {
      KernelTerm term;
      for (int k = 0; k < m.dim; ++k) term.offset[k] = int(offsets[i * m.dim + k]);
      term.value = {re[i], im[i]};
      t.kernel.terms.push_back(term);
    }
    if (2 * t.kernel.support_radius() >= n) throw ConfigError("kernel support does not fit in the box");
    return t;
  }
};

TaskOutput run_hs(const TaskContext& ctx) {
  const auto p = HsTask::parse(ctx.spec.config);
  const HsReport rep = hs_norm_check(p.kernel, p.grid, p.s, p.twist);
  LedgerRow r;
  r.seed = ctx.spec.base_seed;
  r.method = "hilbert_schmidt";
  r.value = rep.lhs;
  r.metrics = {{"rhs", rep.rhs}, {"c_s", rep.c_s}, {"rel_dev", rep.rel_dev}};
  return {{std::move(r)}, {}};
}

// ---- clifford-selftest

TaskOutput run_clifford(const TaskContext& ctx) {
  TaskOutput out;
  for (const auto& check : clifford_selftest()) {
    LedgerRow r;
    r.seed = ctx.spec.base_seed;
    r.method = "relation";
    r.value = check.passed ? 1.0 : 0.0;
    r.integer = check.passed ? 1 : 0;
    r.labels.push_back({"relation", check.name});
    out.rows.push_back(std::move(r));
  }
  return out;
}

}  // namespace

const std::set<std::string>& task_keys(Task t) {
  static const std::set<std::string> bulk_chern = with_model({"mu", "core_fractions", "window_margin"});
  static const std::set<std::string> odd = {"sites", "spacing", "winding", "phase_disorder", "core_fractions",
                                            "window_margin"};
  static const std::set<std::string> mod2 = with_model({"mu", "conserved_spin"});
  static const std::set<std::string> edge = with_model({"gap_center", "gap_half_widths", "edge_core_fraction"});
  static const std::set<std::string> bulk_edge = with_model(
      {"mu", "gap_center", "gap_half_width", "edge_sites_per_axis", "core_fraction", "edge_core_fraction"});
  static const std::set<std::string> sobolev = with_model({"mu", "fm_s", "fm_energy_lo", "fm_energy_hi"});
  static const std::set<std::string> residue = {"dimension", "s_values", "weight", "lattice_spacing", "radius"};
  static const std::set<std::string> hs = {"dimension", "sites",         "spacing",           "hs_exponent",
                                           "twist",     "kernel_offsets", "kernel_values", "kernel_values_imag"};
  static const std::set<std::string> none;
  static const std::set<std::string> scan = with_model({"mus", "comparison_sites"});
  switch (t) {
    case Task::bulk_chern: return bulk_chern;
    case Task::odd_chern: return odd;
    case Task::mod2_index: return mod2;
    case Task::edge_winding: return edge;
    case Task::bulk_edge_check: return bulk_edge;
    case Task::sobolev_report: return sobolev;
    case Task::residue_check: return residue;
    case Task::hs_check: return hs;
    case Task::clifford_selftest: return none;
    case Task::localization_scan: return scan;
  }
  return none;
}

void validate_task(Task t, const FlatConfig& cfg, int samples) {
  switch (t) {
    case Task::bulk_chern: BulkChern::parse(cfg); break;
    case Task::odd_chern: OddChern::parse(cfg); break;
    case Task::mod2_index: Mod2::parse(cfg); break;
    case Task::edge_winding: EdgeWinding::parse(cfg); break;
    case Task::bulk_edge_check: parse_bulk_edge(cfg); break;
    case Task::sobolev_report: SobolevTask::parse(cfg, samples); break;
    case Task::residue_check: Residue::parse(cfg); break;
    case Task::hs_check: HsTask::parse(cfg); break;
    case Task::clifford_selftest: break;
    case Task::localization_scan: Scan::parse(cfg, samples); break;
  }
}

TaskOutput execute_task(const TaskContext& ctx) {
  switch (ctx.spec.task) {
    case Task::bulk_chern: return run_bulk_chern(ctx);
    case Task::odd_chern: return run_odd_chern(ctx);
    case Task::mod2_index: return run_mod2(ctx);
    case Task::edge_winding: return run_edge_winding(ctx);
    case Task::bulk_edge_check: return run_bulk_edge(ctx);
    case Task::sobolev_report: return run_sobolev(ctx);
    case Task::residue_check: return run_residue(ctx);
    case Task::hs_check: return run_hs(ctx);
    case Task::clifford_selftest: return run_clifford(ctx);
    case Task::localization_scan: return run_scan(ctx);
  }
  return {};
}

}  // namespace nctopo::detail
