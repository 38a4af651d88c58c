// SPDX-License-Identifier: Apache-2.0
#include "edgesim/qoe.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace edgesim {

double qoe_score(const PlayerTrace& trace, const Manifest& manifest, const QoEConfig& cfg) {
  if (trace.segments.empty()) throw std::invalid_argument("qoe_score: empty trace");

  const double b_min = manifest.ladder().front().bitrate_mbps;
  const double b_max = manifest.ladder().back().bitrate_mbps;
  const double denom = std::log(b_max / b_min);

  double q_sum = 0.0;
  for (const auto& s : trace.segments) {
    q_sum += denom > 0.0 ? std::log(s.bitrate_mbps / b_min) / denom : 1.0;
  }
  const double quality = q_sum / static_cast<double>(trace.segments.size());

  const PlayerMetrics m = player_metrics(trace);
  const double stall_pen =
      std::min(cfg.stall_cap, cfg.stall_event_penalty * static_cast<double>(m.stall_count) +
                                  cfg.stall_second_penalty * m.stall_total_s);
  const double switch_pen =
      std::min(cfg.switch_cap, cfg.switch_event_penalty * static_cast<double>(m.switch_count));

  const double mos = 1.0 + 4.0 * quality - stall_pen - switch_pen;
  return std::clamp(mos, 1.0, 5.0);
}

namespace {

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double sample_dev(const std::vector<double>& v, double mean) {
  if (v.size() < 2) return 0.0;
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

}  // namespace

StrategyReport aggregate_report(Strategy strategy, const std::vector<PlayerTrace>& traces,
                                const CacheStats& cache, const Manifest& manifest,
                                const QoEConfig& qoe_cfg) {
  if (traces.empty()) throw std::invalid_argument("aggregate_report: no traces");

  StrategyReport r;
  r.strategy = strategy;
  r.cache_active = strategy != Strategy::kLegacy;
  r.cache = cache;
  if (r.cache_active && cache.requests > 0) {
    r.hit_ratio = hit_ratio(cache);
    r.data_saved_percent = data_saved_percent(cache);
  }
  r.cached_gb = static_cast<double>(cache.cached_bytes) / 1e9;
  r.served_gb = static_cast<double>(cache.served_bytes) / 1e9;

  std::vector<double> r_avg, switches, stall_n, stall_avg, stall_total, qoe;
  for (const auto& t : traces) {
    PlayerRow row;
    row.player_id = t.player_id;
    row.arrival = t.arrival;
    row.metrics = player_metrics(t);
    row.qoe = qoe_score(t, manifest, qoe_cfg);
    r_avg.push_back(row.metrics.r_avg_mbps);
    switches.push_back(static_cast<double>(row.metrics.switch_count));
    stall_n.push_back(static_cast<double>(row.metrics.stall_count));
    stall_avg.push_back(row.metrics.stall_avg_s);
    stall_total.push_back(row.metrics.stall_total_s);
    qoe.push_back(row.qoe);
    r.players.push_back(row);
  }

  r.player_count = static_cast<int>(traces.size());
  r.r_avg_mean = mean_of(r_avg);
  r.r_avg_dev = sample_dev(r_avg, r.r_avg_mean);
  r.switch_mean = mean_of(switches);
  r.stall_count_mean = mean_of(stall_n);
  r.stall_avg_mean = mean_of(stall_avg);
  r.stall_total_mean = mean_of(stall_total);
  r.qoe_mean = mean_of(qoe);
  r.qoe_dev = sample_dev(qoe, r.qoe_mean);
  return r;
}

}  // namespace edgesim
