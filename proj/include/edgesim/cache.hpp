// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "edgesim/features.hpp"
#include "edgesim/media.hpp"
#include "edgesim/net.hpp"
#include "edgesim/player.hpp"
#include "edgesim/sim.hpp"

namespace edgesim {

enum class Strategy { kLegacy, kPreemptive, kPredictive };

Strategy strategy_from_string(const std::string& s);
std::string to_string(Strategy s);

struct CacheStats {
  std::uint64_t requests = 0;
  std::uint64_t hits = 0;
  std::uint64_t served_bytes = 0;        // delivered to players
  std::uint64_t hit_bytes = 0;           // served from cache entries
  std::uint64_t miss_origin_bytes = 0;   // pass-through origin traffic
  std::uint64_t cached_bytes = 0;        // completed prefetch payloads
  std::uint64_t prefetch_count = 0;      // prefetch transfers started
  std::uint64_t evictions = 0;
};

/// hits / requests; throws if no request was made.
double hit_ratio(const CacheStats& s);

/// 100 * (served - cached) / served; throws if nothing was served.
double data_saved_percent(const CacheStats& s);

struct CacheEvent {
  SimTime t = 0.0;
  std::string event;  // hit, miss, prefetch_start, prefetch_ready, revalidate, evict
  int seg_index = 0;
  int rep_index = 0;
  std::uint64_t bytes = 0;
  int player_id = -1;
};

struct CacheConfig {
  Strategy strategy = Strategy::kLegacy;
  double ttl_s = 8.0;
  bool prefetch_extends_ttl = false;  // a deduplicated prefetch touch refreshes expiry
  double forecast_latency_s = 0.0;    // delay between serve completion and prefetch start
  double ewma_alpha = 0.3;            // proxy-side bandwidth estimator
};

/// MEC cache proxy between players (radio link) and the origin (backhaul).
///
/// Requests that find a fresh or in-flight entry count as hits and are served
/// from the edge; misses pass through to the origin without being inserted.
/// After serving a segment the proxy prefetches candidates for the next index
/// per strategy: every representation (preemptive) or only the forecast one
/// (predictive). Entries live for a TTL counted from readiness and are
/// refreshed to now + ttl each time a player request hits them.
class EdgeCache : public RequestSink {
 public:
  EdgeCache(EventQueue& ev, const Manifest& manifest, const SegmentSizer& sizer,
            PsLink& backhaul, PsLink& radio, const CacheConfig& cfg,
            Predictor* predictor = nullptr,
            std::function<int(const Player&)> oracle = nullptr);

  void request(Player& player, SegmentId seg) override;

  const CacheStats& stats() const { return stats_; }
  const std::vector<CacheEvent>& event_log() const { return log_; }
  const std::vector<LabeledRecord>& session_records() const { return records_; }

  std::size_t entry_count() const { return entries_.size(); }
  bool has_fresh_entry(SegmentId seg, SimTime now) const;

 private:
  struct Waiter {
    Player* player;
    SimTime t_request;
  };
  struct Entry {
    std::uint64_t bytes = 0;
    bool ready = false;
    SimTime expires_at = 0.0;
    std::uint64_t expiry_gen = 0;
    std::vector<Waiter> waiters;
  };
  struct Session {
    bool has_bw = false;
    double bw_ewma = 0.0;
    bool has_prev = false;
    SimTime prev_req_time = 0.0;
    int prev_rep = 0;
    bool has_pending_fv = false;
    FeatureVector pending_fv;
    int pending_fv_index = 0;
  };

  void serve_over_radio(Player& player, SegmentId seg, std::uint64_t bytes,
                        SimTime t_request, bool was_hit);
  void fetch_through(Player& player, SegmentId seg, std::uint64_t bytes, SimTime t_request);
  void on_served(Player& player, SegmentId seg, std::uint64_t bytes, SimTime t_request,
                 SimTime t_radio_start, SimTime t_delivered, bool was_hit);
  void trigger_prefetch(Player& player, int index);
  void start_prefetch(Player& player, int index);
  void prefetch_one(SegmentId seg, int player_id);
  void on_prefetch_ready(SegmentId seg, int player_id);
  void arm_expiry(SegmentId seg, Entry& e);
  void append_log(SimTime t, const char* event, SegmentId seg, std::uint64_t bytes,
                  int player_id);
  Session& session_for(const Player& player);

  EventQueue* ev_;
  const Manifest* manifest_;
  const SegmentSizer* sizer_;
  PsLink* backhaul_;
  PsLink* radio_;
  CacheConfig cfg_;
  Predictor* predictor_;
  std::function<int(const Player&)> oracle_;

  std::map<SegmentId, Entry> entries_;
  std::map<int, Session> sessions_;
  CacheStats stats_;
  std::vector<CacheEvent> log_;
  std::vector<LabeledRecord> records_;
};

}  // namespace edgesim
