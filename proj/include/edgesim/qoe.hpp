// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "edgesim/cache.hpp"
#include "edgesim/media.hpp"
#include "edgesim/player.hpp"

namespace edgesim {

struct QoEConfig {
  double stall_event_penalty = 0.5;   // per stall
  double stall_second_penalty = 0.05; // per stalled second
  double stall_cap = 1.5;
  double switch_event_penalty = 0.01; // per representation switch
  double switch_cap = 0.5;
};

/// Mean-opinion-score estimate in [1, 5]: 1 + 4 * mean log-normalized quality
/// minus capped stall and switching penalties.
double qoe_score(const PlayerTrace& trace, const Manifest& manifest, const QoEConfig& cfg);

struct PlayerRow {
  int player_id = 0;
  SimTime arrival = 0.0;
  PlayerMetrics metrics;
  double qoe = 0.0;
};

/// One strategy's aggregate over all players of one or more runs.
struct StrategyReport {
  Strategy strategy = Strategy::kLegacy;
  bool cache_active = false;
  CacheStats cache;   // summed across runs
  double hit_ratio = 0.0;          // meaningful only when cache_active
  double cached_gb = 0.0;
  double served_gb = 0.0;
  double data_saved_percent = 0.0; // meaningful only when cache_active

  int player_count = 0;
  double r_avg_mean = 0.0;
  double r_avg_dev = 0.0;     // sample std over players
  double switch_mean = 0.0;
  double stall_count_mean = 0.0;
  double stall_avg_mean = 0.0;
  double stall_total_mean = 0.0;
  double qoe_mean = 0.0;
  double qoe_dev = 0.0;

  std::vector<PlayerRow> players;
};

/// Aggregates per-player metrics (mean over players; sample std where shown).
StrategyReport aggregate_report(Strategy strategy, const std::vector<PlayerTrace>& traces,
                                const CacheStats& cache, const Manifest& manifest,
                                const QoEConfig& qoe_cfg);

}  // namespace edgesim
