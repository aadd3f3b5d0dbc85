#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "nctopo/config.hpp"
#include "nctopo/ledger.hpp"

namespace nctopo {

enum class Task {
  bulk_chern,
  odd_chern,
  mod2_index,
  edge_winding,
  bulk_edge_check,
  sobolev_report,
  residue_check,
  hs_check,
  clifford_selftest,
  localization_scan,
};

/// Command-line spelling, e.g. "bulk-chern".
std::string to_string(Task t);
Task task_from_string(const std::string& s);
const std::vector<Task>& all_tasks();

/// Keys that never change results and are left out of the config hash.
const std::set<std::string>& engineering_keys();

/// A validated experiment. Physics parameters stay in `config` (the hashed source of truth);
/// the ensemble and engineering fields are lifted out for convenience.
struct ExperimentSpec {
  Task task = Task::clifford_selftest;
  FlatConfig config;
  int samples = 1;
  std::uint64_t base_seed = 0;
  int threads = 1;
  /// Empty: no files are written.
  std::filesystem::path out_dir;
  /// Empty: eigendecompositions are not cached.
  std::filesystem::path cache_dir;

  /// Validates the schema of `task` and every task parameter. Throws ConfigError.
  /// cache_dir falls back to the NCTOPO_CACHE_DIR environment variable.
  static ExperimentSpec from_config(FlatConfig cfg);
  static ExperimentSpec from_file(const std::filesystem::path& path);

  /// FNV-1a of the canonical config without engineering keys, 16 hex digits.
  std::string config_hash() const;
  /// base_seed, base_seed + 1, ...
  std::vector<std::uint64_t> seeds() const;
};

/// Executes the task over the ensemble. With an out_dir, appends to out_dir/ledger.jsonl and
/// writes out_dir/<task>.csv plus task tables (bulk_edge.csv, *_decay.csv).
ResultLedger run(const ExperimentSpec& spec);

/// Runs the task once per value of the scalar `key`. Rows carry sweep_parameter and
/// sweep_value labels; with an out_dir the long-format table goes to sweep_<key>.csv.
ResultLedger sweep(const ExperimentSpec& spec, const std::string& key, const std::vector<std::string>& values);

/// True when every relation row of a clifford-selftest ledger passed.
bool selftest_passed(const ResultLedger& ledger);

}  // namespace nctopo
