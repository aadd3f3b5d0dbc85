#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "nctopo/experiment.hpp"
#include "nctopo/version.hpp"

namespace {

enum Exit { ok = 0, bad_config = 1, failed = 2, selftest_failed = 3 };

struct Flags {
  std::string config;
  std::optional<std::string> out;
  std::optional<long> samples;
  std::optional<long> seed;
  std::optional<long> threads;
  std::optional<std::string> cache;
};

void add_flags(CLI::App& cmd, Flags& f) {
  cmd.add_option("--config", f.config, "YAML config file")->required()->check(CLI::ExistingFile);
  cmd.add_option("--out", f.out, "output directory (ledger.jsonl and CSV files)");
  cmd.add_option("--samples", f.samples, "number of disorder samples (overrides the config)");
  cmd.add_option("--seed", f.seed, "base seed (overrides the config)");
  cmd.add_option("--threads", f.threads, "worker threads");
  cmd.add_option("--cache", f.cache, "eigendecomposition cache directory (else cache_dir, else $NCTOPO_CACHE_DIR)");
}

nctopo::ExperimentSpec load(const Flags& f, std::optional<nctopo::Task> task) {
  auto cfg = nctopo::FlatConfig::from_file(f.config);
  if (task) {
    const std::string name = nctopo::to_string(*task);
    if (cfg.has("task") && cfg.text("task") != name)
      throw nctopo::ConfigError("config task '" + cfg.text("task") + "' does not match subcommand '" + name + "'");
    cfg.set_scalar("task", name);
  }
  if (f.samples) cfg.set_scalar("samples", std::to_string(*f.samples));
  if (f.seed) cfg.set_scalar("seed", std::to_string(*f.seed));
  if (f.threads) cfg.set_scalar("threads", std::to_string(*f.threads));
  if (f.out) cfg.set_scalar("out_dir", *f.out);
  if (f.cache) cfg.set_scalar("cache_dir", *f.cache);
  return nctopo::ExperimentSpec::from_config(std::move(cfg));
}

void print(const nctopo::ResultLedger& ledger) {
  for (const auto& r : ledger.rows()) {
    std::printf("%-20s seed=%-6llu %-22s re=%-+.10g im=%-+.3g", r.task.c_str(), static_cast<unsigned long long>(r.seed),
                r.method.c_str(), r.value.real(), r.value.imag());
    if (r.integer) std::printf(" int=%ld", *r.integer);
    for (const auto& [k, v] : r.labels) std::printf(" %s=%s", k.c_str(), v.c_str());
    std::printf("\n");
  }
  if (!ledger.file().empty()) std::printf("ledger: %s (%zu rows)\n", ledger.file().c_str(), ledger.rows().size());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"nctopo: topological invariants of disordered lattice models"};
  app.set_version_flag("--version", std::string(nctopo::version));
  app.require_subcommand(1);

  Flags flags;
  std::optional<nctopo::Task> chosen;
  for (nctopo::Task t : nctopo::all_tasks()) {
    auto* cmd = app.add_subcommand(nctopo::to_string(t), "run the " + nctopo::to_string(t) + " task");
    add_flags(*cmd, flags);
    cmd->callback([&chosen, t] { chosen = t; });
  }

  std::string param;
  std::vector<std::string> values;
  bool sweeping = false;
  auto* sw = app.add_subcommand("sweep", "run the config's task once per value of one scalar parameter");
  add_flags(*sw, flags);
  sw->add_option("--param", param, "config key to vary")->required();
  sw->add_option("--values", values, "values (may be empty)")->expected(0, -1);
  sw->callback([&sweeping] { sweeping = true; });

  CLI11_PARSE(app, argc, argv);

  try {
    const nctopo::ExperimentSpec spec = load(flags, chosen);
    if (sweeping) {
      print(nctopo::sweep(spec, param, values));
      return ok;
    }
    const nctopo::ResultLedger ledger = nctopo::run(spec);
    print(ledger);
    if (spec.task == nctopo::Task::clifford_selftest && !nctopo::selftest_passed(ledger)) {
      std::cerr << "nctopo: clifford self-test failed\n";
      return selftest_failed;
    }
    return ok;
  } catch (const nctopo::ConfigError& e) {
    std::cerr << "nctopo: invalid config: " << e.what() << '\n';
    return bad_config;
  } catch (const std::exception& e) {
    std::cerr << "nctopo: " << e.what() << '\n';
    return failed;
  }
}
