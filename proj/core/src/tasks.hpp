#pragma once

#include <set>
#include <string>
#include <vector>

#include "nctopo/experiment.hpp"
#include "nctopo/spectral.hpp"

namespace nctopo::detail {

struct TaskContext {
  const ExperimentSpec& spec;
  std::string config_hash;
  const EigenCache* cache = nullptr;
};

struct TaskOutput {
  std::vector<LedgerRow> rows;
  std::vector<Table> tables;
};

/// Task-specific keys accepted on top of the common ones.
const std::set<std::string>& task_keys(Task t);

/// Parses every task parameter without computing anything. Throws ConfigError.
void validate_task(Task t, const FlatConfig& cfg, int samples);

TaskOutput execute_task(const TaskContext& ctx);

}  // namespace nctopo::detail
