// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "edgesim/cache.hpp"
#include "edgesim/forecast.hpp"
#include "edgesim/scenario.hpp"

namespace edgesim {

/// Everything one simulation produced, ready for reporting or export.
struct RunResult {
  Strategy strategy = Strategy::kLegacy;
  std::uint64_t seed = 0;
  double ttl_s = 0.0;
  SimTime end_time = 0.0;
  CacheStats stats;
  std::vector<CacheEvent> cache_log;
  std::vector<PlayerTrace> traces;
  std::vector<LabeledRecord> records;
};

/// Runs one full scenario under the given strategy. Predictive runs need a
/// model, or oracle = true for the perfect predictor.
RunResult run_simulation(const ScenarioConfig& cfg, Strategy strategy, std::uint64_t seed,
                         const TrainedModel* model = nullptr, bool oracle = false);

}  // namespace edgesim
