#include <catch_amalgamated.hpp>

#include <cstdlib>
#include <fstream>
#include <json.hpp>
#include <random>
#include <sstream>

#include "nctopo/experiment.hpp"

using namespace nctopo;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;

namespace {

class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() / ("nctopo_harness_" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

// B = 2 pi / 8 on a 16 x 16 box; mu = 2B lies in the first gap.
const char* landau_text = R"(
task: bulk-chern
dimension: 2
sites: 16
spacing: 1.0
flux_quanta: [32]
boundary: dirichlet_all
internal_dofs: 1
potential: none
mu: 1.5707963267948966
core_fractions: [0.5]
)";

const char* odd_text = R"(
task: odd-chern
sites: 12
spacing: 1.0
winding: [0, 1, 2]
phase_disorder: 2.0
core_fractions: [1.0]
samples: 3
seed: 11
)";

ExperimentSpec spec_from(const std::string& text) { return ExperimentSpec::from_config(FlatConfig::from_string(text)); }

}  // namespace

TEST_CASE("task names round trip", "[harness]") {
  REQUIRE(all_tasks().size() == 10);
  for (Task t : all_tasks()) CHECK(task_from_string(to_string(t)) == t);
  CHECK(to_string(Task::bulk_edge_check) == "bulk-edge-check");
  CHECK_THROWS_AS(task_from_string("bulk_chern"), ConfigError);
}

TEST_CASE("schema violations are hard errors", "[harness]") {
  CHECK_THROWS_WITH(spec_from(std::string(landau_text) + "colour: red\n"), ContainsSubstring("unknown key 'colour'"));
  CHECK_THROWS_WITH(spec_from("dimension: 2\n"), ContainsSubstring("'task'"));
  CHECK_THROWS_WITH(spec_from("task: tea\n"), ContainsSubstring("unknown task"));

  // physics parameters have no defaults
  auto cfg = FlatConfig::from_string(landau_text);
  cfg.erase("mu");
  CHECK_THROWS_WITH(ExperimentSpec::from_config(cfg), ContainsSubstring("'mu'"));

  cfg = FlatConfig::from_string(landau_text);
  cfg.set_scalar("boundary", "magnetic_periodic");
  cfg.set_scalar("flux_quanta", "3.5");
  CHECK_THROWS_WITH(ExperimentSpec::from_config(cfg), ContainsSubstring("flux quantization"));

  cfg = FlatConfig::from_string(landau_text);
  cfg.set_scalar("boundary", "dirichlet_last_axis");
  CHECK_THROWS_WITH(ExperimentSpec::from_config(cfg), ContainsSubstring("dirichlet_all"));

  cfg = FlatConfig::from_string(landau_text);
  cfg.set_scalar("samples", "0");
  CHECK_THROWS_AS(ExperimentSpec::from_config(cfg), ConfigError);

  cfg = FlatConfig::from_string(landau_text);
  cfg.set("core_fractions", {"0.5", "1.5"});
  CHECK_THROWS_AS(ExperimentSpec::from_config(cfg), ConfigError);

  // ensemble minimums are checked up front
  cfg = FlatConfig::from_string(landau_text);
  cfg.set_scalar("task", "sobolev-report");
  cfg.erase("core_fractions");
  cfg.set_scalar("samples", "3");
  CHECK_THROWS_WITH(ExperimentSpec::from_config(cfg), ContainsSubstring("samples >= 10"));

  cfg = FlatConfig::from_string(landau_text);
  cfg.set_scalar("task", "mod2-index");
  cfg.erase("core_fractions");
  CHECK_THROWS_WITH(ExperimentSpec::from_config(cfg), ContainsSubstring("internal_dofs 2"));
}

TEST_CASE("engineering keys stay out of the config hash", "[harness]") {
  const auto base = spec_from(landau_text);
  CHECK(base.config_hash().size() == 16);
  CHECK(base.threads == 1);
  CHECK(base.samples == 1);
  CHECK(base.base_seed == 0);

  auto cfg = FlatConfig::from_string(landau_text);
  cfg.set_scalar("threads", "4");
  cfg.set_scalar("out_dir", "/tmp/elsewhere");
  cfg.set_scalar("cache_dir", "/tmp/cache");
  const auto eng = ExperimentSpec::from_config(cfg);
  CHECK(eng.config_hash() == base.config_hash());
  CHECK(eng.threads == 4);

  cfg = FlatConfig::from_string(landau_text);
  cfg.set_scalar("mu", "1.6");
  CHECK(ExperimentSpec::from_config(cfg).config_hash() != base.config_hash());
  cfg = FlatConfig::from_string(landau_text);
  cfg.set_scalar("seed", "5");
  const auto seeded = ExperimentSpec::from_config(cfg);
  CHECK(seeded.config_hash() != base.config_hash());
  CHECK(seeded.seeds() == std::vector<std::uint64_t>{5});
}

TEST_CASE("cache directory: flag or config first, then the environment", "[harness]") {
  TempDir tmp;
  const auto env_dir = tmp.path() / "env_cache";
  ::setenv("NCTOPO_CACHE_DIR", env_dir.c_str(), 1);
  CHECK(spec_from(odd_text).cache_dir == env_dir);
  auto cfg = FlatConfig::from_string(landau_text);
  cfg.set_scalar("cache_dir", (tmp.path() / "cfg_cache").string());
  const auto spec = ExperimentSpec::from_config(cfg);
  CHECK(spec.cache_dir == tmp.path() / "cfg_cache");
  ::setenv("NCTOPO_CACHE_DIR", "", 1);
  CHECK(spec_from(odd_text).cache_dir.empty());

  // the cached run stores one eigendecomposition and reproduces the uncached rows
  const auto cached = run(spec);
  CHECK(std::distance(std::filesystem::directory_iterator(spec.cache_dir), std::filesystem::directory_iterator{}) == 1);
  const auto again = run(spec);
  const auto plain = run(spec_from(landau_text));
  REQUIRE(cached.rows().size() == plain.rows().size());
  for (std::size_t i = 0; i < plain.rows().size(); ++i) {
    CHECK(ResultLedger::to_json_line(cached.rows()[i]) == ResultLedger::to_json_line(plain.rows()[i]));
    CHECK(ResultLedger::to_json_line(again.rows()[i]) == ResultLedger::to_json_line(plain.rows()[i]));
  }
}

TEST_CASE("clifford-selftest passes every relation", "[harness]") {
  const auto ledger = run(spec_from("task: clifford-selftest\n"));
  CHECK(ledger.rows().size() > 20);
  CHECK(selftest_passed(ledger));
  CHECK_FALSE(selftest_passed(ResultLedger{}));
}

TEST_CASE("bulk-chern on a clean Landau box: cyclic and Fredholm rows agree", "[harness]") {
  const auto ledger = run(spec_from(landau_text));
  std::optional<double> cyclic;
  std::optional<long> fredholm, kitaev;
  for (const auto& r : ledger.rows()) {
    CHECK(r.task == "bulk-chern");
    if (r.method == "cyclic_even" && !r.label("aggregate")) cyclic = r.value.real();
    if (r.method == "fredholm_kernel") fredholm = r.integer;
    if (r.method == "kitaev_triple") kitaev = r.integer;
  }
  REQUIRE(cyclic);
  REQUIRE(fredholm);
  CHECK(*fredholm == -1);
  CHECK(kitaev == fredholm);
  CHECK_THAT(*cyclic, WithinAbs(double(*fredholm), 0.05));
}

TEST_CASE("odd-chern rows are 2k under random diagonal phases", "[harness]") {
  const auto ledger = run(spec_from(odd_text));
  REQUIRE(ledger.rows().size() == 9);
  for (const auto& r : ledger.rows()) {
    const long k = std::stol(*r.label("winding"));
    CHECK_THAT(r.value.real(), WithinAbs(2.0 * k, 1e-8));
    CHECK(r.integer == 2 * k);
  }
  CHECK(ledger.rows()[0].seed == 11);
  CHECK(ledger.rows()[8].seed == 13);
}

TEST_CASE("ledger and CSV files", "[harness]") {
  TempDir tmp;
  auto cfg = FlatConfig::from_string(odd_text);
  cfg.set_scalar("out_dir", tmp.path().string());
  const auto spec = ExperimentSpec::from_config(cfg);
  const auto ledger = run(spec);
  REQUIRE(ledger.file() == tmp.path() / "ledger.jsonl");

  const auto text = lines(slurp(ledger.file()));
  REQUIRE(text.size() == 1 + ledger.rows().size());
  const auto header = nlohmann::json::parse(text[0]);
  CHECK(header["type"] == "header");
  CHECK(header["config_hash"] == spec.config_hash());
  CHECK(header.contains("timestamp"));
  CHECK(header.contains("version"));
  for (std::size_t i = 1; i < text.size(); ++i) {
    const auto row = nlohmann::json::parse(text[i]);
    CHECK(row["config_hash"] == spec.config_hash());
    CHECK(row.contains("seed"));
    CHECK(row.contains("version"));
    CHECK(row["method"] == "cyclic_odd");
    CHECK_FALSE(row.contains("timestamp"));
  }

  const auto csv = lines(slurp(tmp.path() / "odd-chern.csv"));
  REQUIRE(csv.size() == 1 + ledger.rows().size());
  CHECK(csv[0].rfind("config_hash,task,seed,method,re,im,integer", 0) == 0);
  CHECK_THAT(csv[0], ContainsSubstring("winding"));

  // append-only: a second run adds a header and its rows behind the first
  run(spec);
  CHECK(lines(slurp(ledger.file())).size() == 2 * text.size());
}

TEST_CASE("reruns reproduce the ledger except for timestamps", "[harness]") {
  TempDir a, b;
  for (const auto* dir : {&a, &b}) {
    auto cfg = FlatConfig::from_string(odd_text);
    cfg.set_scalar("out_dir", dir->path().string());
    if (dir == &b) cfg.set_scalar("threads", "3");
    run(ExperimentSpec::from_config(cfg));
  }
  const auto ta = slurp(a.path() / "ledger.jsonl");
  const auto tb = slurp(b.path() / "ledger.jsonl");
  CHECK(ResultLedger::without_timestamps(ta) == ResultLedger::without_timestamps(tb));
  CHECK(ResultLedger::without_timestamps(ta).find("timestamp") == std::string::npos);
  CHECK(slurp(a.path() / "odd-chern.csv") == slurp(b.path() / "odd-chern.csv"));
}

TEST_CASE("sweep over a scalar parameter", "[harness]") {
  TempDir tmp;
  auto cfg = FlatConfig::from_string(landau_text);
  cfg.set_scalar("out_dir", tmp.path().string());
  const auto spec = ExperimentSpec::from_config(cfg);

  SECTION("mu across the clean gap keeps every integer") {
    const std::vector<std::string> mus{"1.3", "1.5707963267948966", "1.9"};
    const auto ledger = sweep(spec, "mu", mus);
    std::set<std::string> seen_values;
    for (const auto& r : ledger.rows()) {
      CHECK(r.label("sweep_parameter") == "mu");
      seen_values.insert(*r.label("sweep_value"));
      if (r.method == "fredholm_kernel" || r.method == "kitaev_triple") CHECK(r.integer == -1);
    }
    CHECK(seen_values.size() == 3);
    const auto csv = lines(slurp(tmp.path() / "sweep_mu.csv"));
    CHECK(csv.size() == 1 + ledger.rows().size());
    CHECK_THAT(csv[0], ContainsSubstring("sweep_parameter,sweep_value"));
  }
  SECTION("empty value list gives an empty ledger") {
    const auto ledger = sweep(spec, "mu", {});
    CHECK(ledger.rows().empty());
    CHECK(lines(slurp(ledger.file())).size() == 1);
  }
  SECTION("path errors") {
    CHECK_THROWS_WITH(sweep(spec, "bump_radius", {"1"}), ContainsSubstring("not found"));
    auto listed = spec;
    listed.config.set("core_fractions", {"0.4", "0.5"});
    CHECK_THROWS_WITH(sweep(listed, "core_fractions", {"0.4"}), ContainsSubstring("not a scalar"));
    CHECK_THROWS_AS(sweep(spec, "threads", {"2"}), ConfigError);
    CHECK_THROWS_AS(sweep(spec, "mu", {"abc"}), ConfigError);
  }
}

TEST_CASE("residue-check and hs-check rows", "[harness]") {
  const auto res = run(spec_from("task: residue-check\ndimension: 1\ns_values: [1.5, 2.0, 3.0]\nweight: 1.0\n"));
  REQUIRE(res.rows().size() == 4);
  for (std::size_t i = 0; i < 3; ++i) CHECK(*res.rows()[i].metric("rel_dev") <= 0.005);
  CHECK(res.rows()[3].method == "residue");
  CHECK(*res.rows()[3].metric("rel_dev") <= 0.01);

  const auto hs = run(spec_from(
      "task: hs-check\ndimension: 1\nsites: 64\nspacing: 1.0\nhs_exponent: 3.0\n"
      "kernel_offsets: [1, -2]\nkernel_values: [1.0, 0.5]\n"));
  REQUIRE(hs.rows().size() == 1);
  CHECK(*hs.rows()[0].metric("rel_dev") <= 0.01);
  CHECK_THROWS_AS(spec_from("task: hs-check\ndimension: 1\nsites: 64\nspacing: 1.0\nhs_exponent: 3.0\n"
                            "kernel_offsets: [1, -2]\nkernel_values: [1.0]\n"),
                  ConfigError);
}

TEST_CASE("localization-scan compares fitted rates across sizes", "[harness]") {
  const auto ledger = run(spec_from(
      "task: localization-scan\ndimension: 2\nsites: 16\nspacing: 1.0\nfield: [0.0]\nboundary: dirichlet_all\n"
      "internal_dofs: 1\npotential: random_bumps\ndisorder_amplitude: 32.0\nbump_radius: 0.5\nmus: [-16.0]\n"
      "comparison_sites: 20\nsamples: 5\n"));
  std::vector<const LedgerRow*> fits;
  int index_rows = 0;
  for (const auto& r : ledger.rows()) {
    if (r.method == "kernel_decay") fits.push_back(&r);
    if (r.method == "fredholm_kernel") ++index_rows;
  }
  REQUIRE(fits.size() == 2);
  CHECK(index_rows == 5);
  CHECK(*fits[0]->label("sites") == "16");
  CHECK_FALSE(fits[0]->metric("rate_ratio"));
  CHECK(*fits[1]->label("sites") == "20");
  REQUIRE(fits[1]->metric("rate_ratio"));
  CHECK_THAT(*fits[1]->metric("rate_ratio"), WithinAbs(fits[1]->value.real() / fits[0]->value.real(), 1e-12));
  CHECK(*fits[1]->metric("rate_ratio") > 0.0);
}

TEST_CASE("bulk-edge-check writes one combined row per sample", "[harness]") {
  TempDir tmp;
  const auto spec = spec_from(std::string(R"(
task: bulk-edge-check
dimension: 2
sites: 16
spacing: 1.0
flux_quanta: [32]
boundary: dirichlet_all
internal_dofs: 1
potential: none
mu: 1.5707963267948966
gap_center: 1.335176877775662
gap_half_width: 0.3141592653589793
edge_sites_per_axis: [64, 12]
samples: 2
out_dir: )") + tmp.path().string() + "\n");
  const auto ledger = run(spec);
  const auto csv = lines(slurp(tmp.path() / "bulk_edge.csv"));
  REQUIRE(csv.size() == 3);
  CHECK(csv[0] == "seed,chern_re,chern_im,fredholm,edge_winding,edge_trace,discrepancy");
  const LedgerRow& summary = ledger.rows().back();
  CHECK(summary.method == "bulk_edge_summary");
  CHECK(summary.integer == 1);
  for (const auto& r : ledger.rows())
    if (r.method == "edge_winding") CHECK_THAT(*r.metric("edge_trace"), WithinAbs(1.0, 0.05));
}
