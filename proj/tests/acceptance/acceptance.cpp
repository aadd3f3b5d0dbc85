// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "nctopo/clifford.hpp"
#include "nctopo/experiment.hpp"
#include "nctopo/invariants.hpp"
#include "nctopo/lattice_model.hpp"
#include "nctopo/spectral.hpp"

namespace fs = std::filesystem;
using namespace nctopo;

namespace {

constexpr double pi = std::numbers::pi;

std::string num(double v, int digits = 6) {
  std::ostringstream os;
  os.precision(digits);
  os << v;
  return os.str();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Recorded {
  std::string text;
  fs::path dir;
  double seconds = 0.0;
};

class Session {
 public:
  explicit Session(fs::path root) : root_(std::move(root)) {
    fs::remove_all(root_);
    fs::create_directories(root_);
  }

  /// Runs a YAML spec into its own output directory and remembers it for the rerun check.
  ResultLedger run_spec(const std::string& tag, const std::string& text) {
    const fs::path dir = root_ / tag;
    auto cfg = FlatConfig::from_string(text);
    cfg.set_scalar("out_dir", dir.string());
    const auto t0 = std::chrono::steady_clock::now();
    ResultLedger ledger = run(ExperimentSpec::from_config(cfg));
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    recorded_.push_back({text, dir, s});
    return ledger;
  }

  void info(const std::string& line) { std::printf("  info: %s\n", line.c_str()); }

  const std::vector<Recorded>& recorded() const { return recorded_; }
  const fs::path& root() const { return root_; }

 private:
  fs::path root_;
  std::vector<Recorded> recorded_;
};

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + std::string("failed: ") + what;
    }
  }
  void note(const std::string& what) { detail += (detail.empty() ? "" : "; ") + what; }
};

std::vector<const LedgerRow*> rows_of(const ResultLedger& l, const std::string& method) {
  std::vector<const LedgerRow*> out;
  for (const auto& r : l.rows())
    if (r.method == method && !r.label("aggregate")) out.push_back(&r);
  return out;
}

std::string landau_model(int n, double flux, const std::string& boundary = "dirichlet_all") {
  return "dimension: 2\nsites: " + std::to_string(n) + "\nspacing: 1.0\nflux_quanta: [" + num(flux, 17) +
         "]\nboundary: " + boundary + "\ninternal_dofs: 1\n";
}

/// Clean torus spectrum: the gap above the lowest `below` eigenvalues.
struct Gap {
  double lo = 0.0, hi = 0.0;
  double center() const { return 0.5 * (lo + hi); }
  double half() const { return 0.5 * (hi - lo); }
};

Gap torus_gap(int n, double flux, std::size_t below) {
  ModelConfig m;
  m.dim = 2;
  m.spacing = 1.0;
  m.box_length = n;
  const double b = 2.0 * pi * flux / (double(n) * n);
  m.field[0][1] = b;
  m.field[1][0] = -b;
  m.boundary = Boundary::magnetic_periodic;
  const auto sd = diagonalize(build_bulk_hamiltonian(m, sample_disorder(m, 0)));
  return {sd.eigenvalues(below - 1), sd.eigenvalues(below)};
}

// ---- criteria

Outcome clifford_exactness(Session& s) {
  Outcome o;
  const auto ledger = s.run_spec("c1_clifford", "task: clifford-selftest\n");
  o.require(selftest_passed(ledger), "generator relations");
  for (int d : {1, 3}) {
    const int n = (d - 1) / 2;
    // (-1)^{n+1} i^{-n} 2^n
    const std::complex<double> expected =
        std::pow(-1.0, n + 1) * std::pow(std::complex<double>(0.0, 1.0), -n) * std::pow(2.0, n);
    const auto rep = make_clifford(d, CliffordKind::spinor);
    ExactMatrix prod = ExactMatrix::identity(rep.fiber());
    for (const auto& g : rep.gammas) prod = prod * g;
    const auto tr = prod.trace().to_complex();
    o.require(tr == expected && odd_spinor_trace(d).to_complex() == expected, "odd trace d=" + std::to_string(d));
  }
  o.note(std::to_string(ledger.rows().size()) + " relation checks");
  return o;
}

Outcome residue_identity(Session& s) {
  Outcome o;
  double worst_zeta = 0.0, worst_res = 0.0;
  for (int d : {1, 2}) {
    const auto ledger = s.run_spec("c2_residue_d" + std::to_string(d),
                                   "task: residue-check\ndimension: " + std::to_string(d) + "\ns_values: [" +
                                       num(d + 0.5) + ", " + num(d + 1.0) + ", " + num(d + 2.0) + "]\nweight: 1.0\n");
    for (const auto* r : rows_of(ledger, "zeta")) worst_zeta = std::max(worst_zeta, *r->metric("rel_dev"));
    for (const auto* r : rows_of(ledger, "residue")) worst_res = std::max(worst_res, *r->metric("rel_dev"));
  }
  o.require(worst_zeta <= 0.005, "zeta deviation " + num(worst_zeta) + " > 0.5%");
  o.require(worst_res <= 0.01, "residue deviation " + num(worst_res) + " > 1%");
  o.note("max zeta dev " + num(worst_zeta, 3) + ", max residue dev " + num(worst_res, 3));
  return o;
}

Outcome hs_identity(Session& s) {
  Outcome o;
  const char* kernels[] = {
      "kernel_offsets: [1]\nkernel_values: [1.0]\n",
      "kernel_offsets: [0, 2, -2]\nkernel_values: [1.0, 0.5, 0.5]\n",
      "kernel_offsets: [1, -1, 3]\nkernel_values: [0.3, 0.3, -0.2]\nkernel_values_imag: [0.4, -0.4, 0.1]\n",
  };
  double worst = 0.0;
  int k = 0;
  for (const char* kernel : kernels) {
    const auto ledger = s.run_spec("c3_hs_" + std::to_string(k++),
                                   std::string("task: hs-check\ndimension: 1\nsites: 64\nspacing: 1.0\nhs_exponent: 3.0\n") +
                                       kernel);
    worst = std::max(worst, *ledger.rows().front().metric("rel_dev"));
  }
  o.require(worst <= 0.01, "relative deviation " + num(worst) + " > 1%");
  o.note("max relative deviation " + num(worst, 3));
  return o;
}

struct TriangleRow {
  std::uint64_t seed = 0;
  double cyclic = 0.0;
  double kitaev = 0.0;
  std::optional<long> fredholm;
  std::string error;
};

std::vector<TriangleRow> triangle_rows(const ResultLedger& ledger) {
  std::map<std::uint64_t, TriangleRow> by_seed;
  for (const auto& r : ledger.rows()) {
    if (r.label("aggregate")) continue;
    auto& t = by_seed[r.seed];
    t.seed = r.seed;
    if (r.method == "cyclic_even" && r.window && r.window->core_fraction == 0.5) t.cyclic = r.value.real();
    if (r.method == "kitaev_triple") t.kitaev = r.value.real();
    if (r.method == "fredholm_kernel") {
      t.fredholm = r.integer;
      t.error = r.label("error").value_or("");
    }
  }
  std::vector<TriangleRow> out;
  for (auto& [seed, t] : by_seed) out.push_back(t);
  return out;
}

// Box of the Landau criteria: 32 x 32, eight flux quanta.
constexpr int landau_n = 32;
constexpr double landau_flux = 8.0;

Outcome landau_chern(Session& s) {
  Outcome o;
  const Gap gap = torus_gap(landau_n, landau_flux, std::size_t(landau_flux));
  s.info("torus 32x32 with 8 flux quanta: first gap [" + num(gap.lo) + ", " + num(gap.hi) + "], mu = " + num(gap.center()));
  const auto ledger = s.run_spec("c4_landau", "task: bulk-chern\n" + landau_model(landau_n, landau_flux) +
                                                  "potential: none\nmu: " + num(gap.center(), 17) +
                                                  "\ncore_fractions: [0.3, 0.4, 0.5, 0.6, 0.7]\n");
  const auto t = triangle_rows(ledger).front();
  std::vector<double> sweep;
  for (const auto* r : rows_of(ledger, "cyclic_even")) sweep.push_back(r->value.real());
  const double spread = *std::max_element(sweep.begin(), sweep.end()) - *std::min_element(sweep.begin(), sweep.end());
  const long kit = std::lround(t.kitaev);
  o.note("fredholm " + (t.fredholm ? std::to_string(*t.fredholm) : "ambiguous (" + t.error + ")") + ", kitaev " +
         num(t.kitaev) + ", cyclic(0.5) " + num(t.cyclic) + ", window spread " + num(spread, 3));
  o.require(t.fredholm.has_value(), "fredholm index ambiguous");
  o.require(t.fredholm && *t.fredholm == kit, "fredholm and kitaev integers differ");
  o.require(t.fredholm && std::abs(*t.fredholm) == 1, "|index| != 1");
  o.require(t.fredholm && std::abs(t.cyclic - double(*t.fredholm)) <= 0.05, "cyclic not within 0.05 of the integer");
  o.require(spread <= 0.03, "window sweep varies by more than 0.03");

  // same methods at a field where the magnetic length is well inside the box
  const Gap strong = torus_gap(landau_n, 128.0, 128);
  const auto ref = s.run_spec("c4_reference_128_flux", "task: bulk-chern\n" + landau_model(landau_n, 128.0) +
                                                          "potential: none\nmu: " + num(strong.center(), 17) +
                                                          "\ncore_fractions: [0.3, 0.5, 0.7]\n");
  const auto rt = triangle_rows(ref).front();
  s.info("reference 32x32 with 128 flux quanta: fredholm " + (rt.fredholm ? std::to_string(*rt.fredholm) : "ambiguous") +
         ", kitaev " + num(rt.kitaev) + ", cyclic(0.5) " + num(rt.cyclic));
  return o;
}

Outcome oracle_triangle(Session& s) {
  Outcome o;
  const Gap gap = torus_gap(landau_n, landau_flux, std::size_t(landau_flux));
  const double w = 0.2 * (gap.hi - gap.lo);
  const auto ledger = s.run_spec("c5_triangle", "task: bulk-chern\n" + landau_model(landau_n, landau_flux) +
                                                    "potential: random_bumps\ndisorder_amplitude: " + num(w, 17) +
                                                    "\nbump_radius: 0.5\nmu: " + num(gap.center(), 17) +
                                                    "\ncore_fractions: [0.5]\nsamples: 10\nseed: 1\n");
  std::set<long> integers;
  double worst = 0.0;
  int ambiguous = 0;
  for (const auto& t : triangle_rows(ledger)) {
    if (!t.fredholm) {
      ++ambiguous;
      continue;
    }
    integers.insert(*t.fredholm);
    const double f = double(*t.fredholm);
    worst = std::max({worst, std::abs(t.cyclic - f), std::abs(t.kitaev - f), std::abs(t.cyclic - t.kitaev)});
  }
  o.note("W = " + num(w, 4) + ", max pairwise deviation " + num(worst, 3) + ", distinct integers " +
         std::to_string(integers.size()) + ", ambiguous " + std::to_string(ambiguous));
  o.require(ambiguous == 0, "fredholm index ambiguous on some samples");
  o.require(worst <= 0.05, "methods disagree by more than 0.05");
  o.require(integers.size() == 1, "integer not constant across samples");
  return o;
}

Outcome odd_pairing(Session& s) {
  Outcome o;
  const auto ledger = s.run_spec("c6_odd", "task: odd-chern\nsites: 16\nspacing: 1.0\nwinding: [0, 1, 2]\n"
                                           "phase_disorder: 3.141592653589793\ncore_fractions: [1.0]\nsamples: 3\n");
  double worst = 0.0;
  for (const auto* r : rows_of(ledger, "cyclic_odd")) {
    const double k = std::stod(*r->label("winding"));
    worst = std::max({worst, std::abs(r->value.real() - 2.0 * k), std::abs(r->value.imag())});
  }
  o.require(worst <= 1e-8, "deviation " + num(worst) + " from 2k");
  o.note("max |value - 2k| " + num(worst, 3));
  return o;
}

Outcome bulk_edge(Session& s) {
  Outcome o;
  const int n = 24;
  const double flux = 72.0;  // B = 2 pi / 8
  const Gap gap = torus_gap(n, flux, std::size_t(flux));
  const double w1 = 0.5 * gap.half(), w2 = 0.75 * gap.half();
  s.info("torus 24x24 with 72 flux quanta: gap [" + num(gap.lo) + ", " + num(gap.hi) + "], switch half widths " +
         num(w1, 4) + " and " + num(w2, 4));

  const auto be = s.run_spec("c7_landau", "task: bulk-edge-check\n" + landau_model(n, flux) +
                                              "potential: none\nmu: " + num(gap.center(), 17) +
                                              "\ngap_center: " + num(gap.center(), 17) +
                                              "\ngap_half_width: " + num(w1, 17) +
                                              "\nedge_sites_per_axis: [64, 16]\n");
  const double ch = rows_of(be, "cyclic_even").front()->value.real();
  const auto* edge = rows_of(be, "edge_winding").front();
  const double ew = edge->value.real();
  const double tr = *edge->metric("edge_trace");
  o.note("Ch " + num(ch) + ", edge_winding " + num(ew) + ", |Ch + edge_winding| " + num(std::abs(ch + ew), 3));
  s.info("boundary trace without the C_1 prefactor: " + num(tr) + ", |Ch + trace| = " + num(std::abs(ch + tr), 3));
  o.require(std::abs(ch + ew) <= 0.1, "|Ch + edge_winding| > 0.1");

  const std::string strip =
      "dimension: 2\nsites_per_axis: [64, 16]\nspacing: 1.0\nfield: [" + num(2.0 * pi / 8.0, 17) +
      "]\nboundary: dirichlet_last_axis\ninternal_dofs: 1\npotential: none\n";
  const auto widths = s.run_spec("c7_widths", "task: edge-winding\n" + strip + "gap_center: " + num(gap.center(), 17) +
                                                  "\ngap_half_widths: [" + num(w1, 17) + ", " + num(w2, 17) + "]\n");
  const auto ws = rows_of(widths, "edge_winding");
  const double dw = std::abs(ws[0]->value.real() - ws[1]->value.real());
  o.note("width change " + num(dw, 3));
  o.require(dw <= 0.02, "switch widths disagree by more than 0.02");

  // staggered insulator: bands 4 +- sqrt(4 + eps^2), gap (2, 6)
  const auto triv = s.run_spec("c7_trivial",
                               "task: bulk-edge-check\ndimension: 2\nsites: 24\nspacing: 1.0\nfield: [0.0]\n"
                               "boundary: dirichlet_all\ninternal_dofs: 1\npotential: none\nstaggered: 2.0\n"
                               "mu: 4.0\ngap_center: 4.0\ngap_half_width: 1.0\nedge_sites_per_axis: [64, 16]\n");
  const double tch = rows_of(triv, "cyclic_even").front()->value.real();
  const double tew = rows_of(triv, "edge_winding").front()->value.real();
  o.note("trivial Ch " + num(tch, 3) + ", edge " + num(tew, 3));
  o.require(std::abs(tch) <= 0.05 && std::abs(tew) <= 0.05, "trivial insulator not zero within 0.05");
  return o;
}

Outcome kane_mele(Session& s) {
  Outcome o;
  const auto toy = s.run_spec("c8_two_spin", "task: mod2-index\n" + std::string("dimension: 2\nsites: 24\nspacing: 1.0\n") +
                                                 "flux_quanta: [72]\nboundary: dirichlet_all\ninternal_dofs: 2\n"
                                                 "dof_field_sign: [1, -1]\npotential: none\nmu: " +
                                                 num(pi / 2.0, 17) + "\nconserved_spin: true\n");
  const auto* bit = rows_of(toy, "mod2").front();
  const auto spin = rows_of(toy, "spin_fredholm");
  o.require(bit->integer == 1, "two-spin toy bit " + std::to_string(bit->integer.value_or(-1)));
  o.require(!spin.empty() && spin.front()->label("reduction_agrees") == "true" &&
                ((spin.front()->integer.value_or(0) % 2 + 2) % 2) == bit->integer.value_or(-1),
            "per-spin reduction disagrees with the kernel count");
  const auto triv = s.run_spec("c8_trivial", "task: mod2-index\ndimension: 2\nsites: 12\nspacing: 1.0\nfield: [0.0]\n"
                                             "boundary: dirichlet_all\ninternal_dofs: 2\npotential: none\n"
                                             "staggered: 2.0\nmu: 4.0\nconserved_spin: true\n");
  const long tbit = rows_of(triv, "mod2").front()->integer.value_or(-1);
  o.require(tbit == 0, "trivial model bit " + std::to_string(tbit));
  o.note("toy bit " + std::to_string(bit->integer.value_or(-1)) + ", spin index " +
         (spin.empty() ? std::string("n/a") : std::to_string(spin.front()->integer.value_or(0))) + ", trivial bit " +
         std::to_string(tbit));
  return o;
}

Outcome localization(Session& s) {
  Outcome o;
  // clean 2d bandwidth 8; W = 32
  const auto strong = s.run_spec("c9_strong", "task: localization-scan\ndimension: 2\nsites: 24\nspacing: 1.0\n"
                                              "field: [0.0]\nboundary: dirichlet_all\ninternal_dofs: 1\n"
                                              "potential: random_bumps\ndisorder_amplitude: 32.0\nbump_radius: 0.5\n"
                                              "mus: [-16.0]\nsamples: 10\n");
  const auto* fit = rows_of(strong, "kernel_decay").front();
  const double m = fit->value.real();
  const double r2 = fit->metric("r_squared").value_or(0.0);
  const auto idx = rows_of(strong, "fredholm_kernel");
  const bool all_zero = idx.size() == 10 && std::all_of(idx.begin(), idx.end(), [](const LedgerRow* r) { return r->integer == 0; });
  o.require(m > 0.0 && r2 >= 0.9, "decay fit m = " + num(m) + ", R^2 = " + num(r2));
  o.require(all_zero, "fredholm index not 0 on every sample");

  const auto metal = s.run_spec("c9_metal", "task: localization-scan\ndimension: 2\nsites: 24\nspacing: 1.0\n"
                                            "field: [0.0]\nboundary: magnetic_periodic\ninternal_dofs: 1\n"
                                            "potential: none\nmus: [4.001]\nsamples: 5\n");
  const auto verdict = rows_of(metal, "kernel_decay").front()->label("verdict").value_or("?");
  o.require(verdict == "no decay", "clean metal verdict '" + verdict + "'");
  o.note("m = " + num(m, 4) + " (R^2 " + num(r2, 4) + "), fredholm zero on " + std::to_string(idx.size()) +
         " samples, metal: " + verdict);
  return o;
}

Outcome ergodic_trace(Session& s) {
  Outcome o;
  // H = -Laplacian + W cos(k x + phi) on a chain, f = H^2. Per site (H^2)(x, x) = 2 + (2 + V(x))^2,
  // so the ensemble trace over phi is 2 + 4 + W^2 / 2.
  const double w = 1.0;
  const double expected = 6.0 + 0.5 * w * w;
  ModelConfig m;
  m.dim = 1;
  m.spacing = 1.0;
  m.box_length = 1200;
  m.boundary = Boundary::dirichlet_all;
  m.potential.kind = PotentialKind::quasi_periodic;
  m.potential.amplitude = w;
  m.potential.wavevectors = {{pi * (std::sqrt(5.0) - 1.0), 0.0, 0.0}};
  const OperatorKernel h = build_bulk_hamiltonian(m, sample_disorder(m, 7));
  const arma::cx_mat h2 = h.matrix * h.matrix;
  std::vector<double> dev;
  for (double f : {0.05, 0.2, 0.8}) {
    const double t = trace_per_unit_volume(h2, h.grid, {f, 0}).real();
    dev.push_back(std::abs(t - expected) / expected);
  }
  o.note("relative deviations " + num(dev[0], 3) + ", " + num(dev[1], 3) + ", " + num(dev[2], 3));
  o.require(dev[2] <= 0.02, "largest window deviates by more than 2%");
  o.require(dev[0] > dev[1] && dev[1] > dev[2], "deviation does not decrease with the window");
  return o;
}

Outcome determinism(Session& s) {
  Outcome o;
  int compared = 0;
  const auto recorded = s.recorded();
  for (const auto& r : recorded) {
    if (r.seconds > 60.0) continue;
    const fs::path again = s.root() / "rerun" / r.dir.filename();
    auto cfg = FlatConfig::from_string(r.text);
    cfg.set_scalar("out_dir", again.string());
    run(ExperimentSpec::from_config(cfg));
    ++compared;
    const bool same_ledger = ResultLedger::without_timestamps(slurp(r.dir / "ledger.jsonl")) ==
                             ResultLedger::without_timestamps(slurp(again / "ledger.jsonl"));
    bool same_csv = true;
    for (const auto& e : fs::directory_iterator(r.dir))
      if (e.path().extension() == ".csv") same_csv = same_csv && slurp(e.path()) == slurp(again / e.path().filename());
    o.require(same_ledger && same_csv, r.dir.filename().string() + " differs");
  }
  o.require(compared > 0, "nothing to compare");
  o.note(std::to_string(compared) + " specs rerun and compared");
  return o;
}

struct Criterion {
  int id;
  const char* name;
  double budget_seconds;
  std::function<Outcome(Session&)> body;
};

}  // namespace

int main(int argc, char** argv) {
  Session session(argc > 1 ? fs::path(argv[1]) : fs::current_path() / "acceptance_out");
  const std::vector<Criterion> criteria{
      {1, "Clifford exactness", 1.0, clifford_exactness},
      {2, "residue identity", 10.0, residue_identity},
      {3, "Hilbert-Schmidt identity", 10.0, hs_identity},
      {4, "Landau Chern number", 300.0, landau_chern},
      {5, "oracle triangle under disorder", 600.0, oracle_triangle},
      {6, "odd pairing", 1.0, odd_pairing},
      {7, "bulk-edge", 600.0, bulk_edge},
      {8, "Kane-Mele mod-2", 300.0, kane_mele},
      {9, "localization diagnostics", 900.0, localization},
      {10, "ergodic trace convergence", 60.0, ergodic_trace},
      {11, "determinism", 600.0, determinism},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.body(session);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs > c.budget_seconds) o.require(false, "runtime " + num(secs, 3) + " s over budget " + num(c.budget_seconds) + " s");
    if (!o.pass) ++failures;
    std::printf("criterion %2d %s  %-32s %7.2f s  %s\n", c.id, o.pass ? "PASS" : "FAIL", c.name, secs, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria failed\n", failures, criteria.size());
  return failures ? 1 : 0;
}
