#include "nctopo/experiment.hpp"

#include <cstdlib>
#include <memory>

#include "nctopo/spectral.hpp"
#include "tasks.hpp"

namespace nctopo {

namespace {

const std::set<std::string>& common_keys() {
  static const std::set<std::string> keys{"task", "samples", "seed", "threads", "cache_dir", "out_dir"};
  return keys;
}

struct TaskName {
  Task task;
  const char* name;
};

constexpr TaskName task_names[] = {
    {Task::bulk_chern, "bulk-chern"},
    {Task::odd_chern, "odd-chern"},
    {Task::mod2_index, "mod2-index"},
    {Task::edge_winding, "edge-winding"},
    {Task::bulk_edge_check, "bulk-edge-check"},
    {Task::sobolev_report, "sobolev-report"},
    {Task::residue_check, "residue-check"},
    {Task::hs_check, "hs-check"},
    {Task::clifford_selftest, "clifford-selftest"},
    {Task::localization_scan, "localization-scan"},
};

detail::TaskOutput execute(const ExperimentSpec& spec, const std::string& hash) {
  std::unique_ptr<EigenCache> cache;
  if (!spec.cache_dir.empty()) cache = std::make_unique<EigenCache>(spec.cache_dir);
  detail::TaskOutput out = detail::execute_task({spec, hash, cache.get()});
  for (auto& r : out.rows) {
    r.config_hash = hash;
    r.task = to_string(spec.task);
  }
  return out;
}

std::filesystem::path ledger_path(const ExperimentSpec& spec) { return spec.out_dir / "ledger.jsonl"; }

}  // namespace

std::string to_string(Task t) {
  for (const auto& tn : task_names)
    if (tn.task == t) return tn.name;
  return "?";
}

Task task_from_string(const std::string& s) {
  for (const auto& tn : task_names)
    if (s == tn.name) return tn.task;
  throw ConfigError("unknown task '" + s + "'");
}

const std::vector<Task>& all_tasks() {
  static const std::vector<Task> tasks = [] {
    std::vector<Task> out;
    for (const auto& tn : task_names) out.push_back(tn.task);
    return out;
  }();
  return tasks;
}

const std::set<std::string>& engineering_keys() {
  static const std::set<std::string> keys{"threads", "cache_dir", "out_dir"};
  return keys;
}

ExperimentSpec ExperimentSpec::from_config(FlatConfig cfg) {
  ExperimentSpec spec;
  spec.task = task_from_string(cfg.text("task"));
  std::set<std::string> allowed = common_keys();
  const auto& extra = detail::task_keys(spec.task);
  allowed.insert(extra.begin(), extra.end());
  cfg.check_known(allowed);

  const long samples = cfg.integer_or_none("samples").value_or(1);
  if (samples < 1) throw ConfigError("samples must be >= 1");
  spec.samples = int(samples);
  const long seed = cfg.integer_or_none("seed").value_or(0);
  if (seed < 0) throw ConfigError("seed must be nonnegative");
  spec.base_seed = std::uint64_t(seed);
  const long threads = cfg.integer_or_none("threads").value_or(1);
  if (threads < 1) throw ConfigError("threads must be >= 1");
  spec.threads = int(threads);
  if (cfg.has("out_dir")) spec.out_dir = cfg.text("out_dir");
  if (cfg.has("cache_dir")) {
    spec.cache_dir = cfg.text("cache_dir");
  } else if (const char* env = std::getenv("NCTOPO_CACHE_DIR"); env && *env) {
    spec.cache_dir = env;
  }

  detail::validate_task(spec.task, cfg, spec.samples);
  spec.config = std::move(cfg);
  return spec;
}

ExperimentSpec ExperimentSpec::from_file(const std::filesystem::path& path) {
  return from_config(FlatConfig::from_file(path));
}

std::string ExperimentSpec::config_hash() const { return hex64(fnv1a(config.canonical(engineering_keys()))); }

std::vector<std::uint64_t> ExperimentSpec::seeds() const {
  std::vector<std::uint64_t> out(static_cast<std::size_t>(samples));
  for (int i = 0; i < samples; ++i) out[i] = base_seed + std::uint64_t(i);
  return out;
}

ResultLedger run(const ExperimentSpec& spec) {
  const std::string hash = spec.config_hash();
  // compute first, then write: the ledger has a single writer and a fixed row order
  detail::TaskOutput out = execute(spec, hash);
  ResultLedger ledger = spec.out_dir.empty() ? ResultLedger{} : ResultLedger{ledger_path(spec)};
  ledger.write_header(to_string(spec.task), hash, spec.config.canonical(engineering_keys()));
  if (!spec.out_dir.empty()) {
    write_rows_csv(spec.out_dir / (to_string(spec.task) + ".csv"), out.rows);
    for (const auto& t : out.tables) write_table_csv(spec.out_dir / (t.name + ".csv"), t);
  }
  for (auto& r : out.rows) ledger.append(std::move(r));
  return ledger;
}

ResultLedger sweep(const ExperimentSpec& spec, const std::string& key, const std::vector<std::string>& values) {
  if (common_keys().count(key)) throw ConfigError("sweep: '" + key + "' is not a physics parameter");
  if (!spec.config.has(key)) throw ConfigError("sweep: parameter '" + key + "' not found in the config");
  if (spec.config.entries().at(key).size() != 1) throw ConfigError("sweep: parameter '" + key + "' is not a scalar");

  std::vector<ExperimentSpec> runs;
  for (const auto& v : values) {
    FlatConfig cfg = spec.config;
    cfg.set_scalar(key, v);
    ExperimentSpec s = ExperimentSpec::from_config(std::move(cfg));
    s.threads = spec.threads;
    s.out_dir.clear();
    s.cache_dir = spec.cache_dir;
    runs.push_back(std::move(s));
  }

  std::vector<LedgerRow> rows;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    detail::TaskOutput out = execute(runs[i], runs[i].config_hash());
    for (auto& r : out.rows) {
      r.labels.insert(r.labels.begin(), {{"sweep_parameter", key}, {"sweep_value", values[i]}});
      rows.push_back(std::move(r));
    }
  }

  ResultLedger ledger = spec.out_dir.empty() ? ResultLedger{} : ResultLedger{ledger_path(spec)};
  ledger.write_header(to_string(spec.task), spec.config_hash(),
                      spec.config.canonical(engineering_keys()) + "sweep=" + key + "\n");
  if (!spec.out_dir.empty()) write_rows_csv(spec.out_dir / ("sweep_" + key + ".csv"), rows);
  for (auto& r : rows) ledger.append(std::move(r));
  return ledger;
}

bool selftest_passed(const ResultLedger& ledger) {
  bool any = false;
  for (const auto& r : ledger.rows())
    if (r.method == "relation") {
      any = true;
      if (r.integer != 1) return false;
    }
  return any;
}

}  // namespace nctopo
