// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "edgesim/forecast.hpp"
#include "edgesim/qoe.hpp"
#include "edgesim/runner.hpp"

namespace edgesim {

/// Shortest decimal form that parses back to the same double.
std::string format_double(double v);

/// Metadata stamped into every artifact (# comment line in CSVs, fields in JSON).
struct ArtifactMeta {
  std::string config_hash;
  std::string seeds;  // e.g. "1" or "1,2,3"
};

void write_player_traces_csv(const std::string& path, const std::vector<PlayerTrace>& traces,
                             const ArtifactMeta& meta);
void write_stalls_csv(const std::string& path, const std::vector<PlayerTrace>& traces,
                      const ArtifactMeta& meta);
void write_cache_events_csv(const std::string& path, const std::vector<CacheEvent>& log,
                            const ArtifactMeta& meta);
void write_player_metrics_csv(const std::string& path, const StrategyReport& report,
                              const ArtifactMeta& meta);

struct DatasetRow {
  std::uint64_t run_seed = 0;
  int player_id = 0;
  SessionRecord record;
};

void write_dataset_csv(const std::string& path, const std::vector<DatasetRow>& rows,
                       const ArtifactMeta& meta);
/// Reads by header name; requires the seven feature columns plus
/// next_bitrate_mbps, keeps run_seed/player_id provenance when present,
/// skips # comment lines.
Dataset read_dataset_csv(const std::string& path);

void write_confusion_csv(const std::string& path, const ConfusionMatrix& cm,
                         const ArtifactMeta& meta);
void write_correlation_csv(const std::string& path,
                           const std::vector<std::vector<double>>& corr,
                           const ArtifactMeta& meta);

/// Side-by-side strategy comparison (cache row + player row per strategy).
std::string format_report_table(const std::vector<StrategyReport>& reports);
std::string report_to_json_text(const std::vector<StrategyReport>& reports,
                                const ArtifactMeta& meta);
/// Aggregate-only summary (no per-player rows), for per-seed sections.
nlohmann::json strategy_summary_json(const StrategyReport& report);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace edgesim
