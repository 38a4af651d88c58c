// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "edgesim/forecast.hpp"
#include "edgesim/media.hpp"
#include "edgesim/player.hpp"
#include "edgesim/qoe.hpp"

namespace edgesim {

struct LinkSettings {
  double capacity_mbps = 0.0;
  std::string capacity_trace_csv;  // overrides the constant when set
  double rtt_s = 0.0;
};

/// Full experiment description; the shipped default mirrors the reference
/// testbed (6-rung ladder, 4 s segments, 322 s video, 20 players).
struct ScenarioConfig {
  std::string name = "testbed_default";

  std::vector<Representation> ladder = default_ladder();
  double segment_duration_s = 4.0;
  double total_duration_s = 322.0;
  double size_jitter = 0.15;
  std::uint64_t size_seed = 42;

  // The backhaul rtt_s models the whole per-fetch origin-path overhead
  // (handshakes, origin processing), not wire latency; it is what separates
  // a cache hit from a miss at these capacities.
  LinkSettings radio{260.0, "", 0.02};
  LinkSettings backhaul{600.0, "", 0.8};

  int player_count = 20;
  PlayerConfig player{.arrival_gap_unit_s = 1.3};

  double ttl_s = 0.0;  // 0 = 2 * segment_duration_s
  bool prefetch_extends_ttl = false;
  double forecast_latency_s = 0.0;

  ForecastHyper hyper;
  double train_fraction = 0.8;

  QoEConfig qoe;
};

double effective_ttl(const ScenarioConfig& cfg);
Manifest manifest_from_config(const ScenarioConfig& cfg);

/// Every violated constraint, one message per field; empty when valid.
std::vector<std::string> validate_config(const ScenarioConfig& cfg);

ScenarioConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ScenarioConfig& cfg);

/// Reads a JSON config; // and /* */ comments are allowed. Throws
/// std::runtime_error with itemized messages on parse or validation errors.
ScenarioConfig load_config_file(const std::string& path);

/// FNV-1a over the canonical serialization, as a 16-hex-digit string.
std::string config_hash(const ScenarioConfig& cfg);

}  // namespace edgesim
