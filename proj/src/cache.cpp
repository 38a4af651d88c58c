// SPDX-License-Identifier: Apache-2.0
#include "edgesim/cache.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace edgesim {

Strategy strategy_from_string(const std::string& s) {
  if (s == "legacy") return Strategy::kLegacy;
  if (s == "preemptive") return Strategy::kPreemptive;
  if (s == "predictive") return Strategy::kPredictive;
  throw std::invalid_argument("unknown strategy: " + s);
}

std::string to_string(Strategy s) {
  switch (s) {
    case Strategy::kLegacy: return "legacy";
    case Strategy::kPreemptive: return "preemptive";
    case Strategy::kPredictive: return "predictive";
  }
  throw std::logic_error("bad strategy value");
}

double hit_ratio(const CacheStats& s) {
  if (s.requests == 0) throw std::logic_error("hit_ratio: no requests");
  return static_cast<double>(s.hits) / static_cast<double>(s.requests);
}

double data_saved_percent(const CacheStats& s) {
  if (s.served_bytes == 0) throw std::logic_error("data_saved_percent: nothing served");
  return 100.0 *
         (static_cast<double>(s.served_bytes) - static_cast<double>(s.cached_bytes)) /
         static_cast<double>(s.served_bytes);
}

EdgeCache::EdgeCache(EventQueue& ev, const Manifest& manifest, const SegmentSizer& sizer,
                     PsLink& backhaul, PsLink& radio, const CacheConfig& cfg,
                     Predictor* predictor, std::function<int(const Player&)> oracle)
    : ev_(&ev),
      manifest_(&manifest),
      sizer_(&sizer),
      backhaul_(&backhaul),
      radio_(&radio),
      cfg_(cfg),
      predictor_(predictor),
      oracle_(std::move(oracle)) {
  if (cfg_.ttl_s <= 0.0) throw std::invalid_argument("EdgeCache: ttl must be > 0");
  if (cfg_.strategy == Strategy::kPredictive && !predictor_ && !oracle_)
    throw std::invalid_argument("EdgeCache: predictive strategy needs a predictor or oracle");
}

bool EdgeCache::has_fresh_entry(SegmentId seg, SimTime now) const {
  auto it = entries_.find(seg);
  return it != entries_.end() && it->second.ready && now < it->second.expires_at;
}

void EdgeCache::append_log(SimTime t, const char* event, SegmentId seg, std::uint64_t bytes,
                           int player_id) {
  log_.push_back({t, event, seg.index, seg.rep, bytes, player_id});
}

EdgeCache::Session& EdgeCache::session_for(const Player& player) {
  return sessions_[player.id()];
}

void EdgeCache::request(Player& player, SegmentId seg) {
  manifest_->require_valid(seg);
  const SimTime now = ev_->now();
  const std::uint64_t bytes = sizer_->size_bytes(seg);
  ++stats_.requests;

  // Complete the previous feature vector: the label is what got requested now.
  Session& sess = session_for(player);
  if (sess.has_pending_fv && sess.pending_fv_index + 1 == seg.index) {
    const double label =
        manifest_->ladder()[static_cast<std::size_t>(seg.rep - 1)].bitrate_mbps;
    records_.push_back({player.id(), {sess.pending_fv, label}});
    sess.has_pending_fv = false;
  }

  auto it = entries_.find(seg);
  if (it != entries_.end()) {
    Entry& e = it->second;
    if (!e.ready) {
      // Prefetch still in flight: counts as a hit, served once ready.
      ++stats_.hits;
      append_log(now, "hit", seg, bytes, player.id());
      e.waiters.push_back({&player, now});
      return;
    }
    if (now < e.expires_at) {
      ++stats_.hits;
      append_log(now, "hit", seg, bytes, player.id());
      e.expires_at = now + cfg_.ttl_s;  // revalidation
      append_log(now, "revalidate", seg, e.bytes, player.id());
      arm_expiry(seg, e);
      serve_over_radio(player, seg, bytes, now, true);
      return;
    }
    // Expired but the sweep has not fired yet.
    ++stats_.evictions;
    append_log(now, "evict", seg, e.bytes, -1);
    entries_.erase(it);
  }

  append_log(now, "miss", seg, bytes, player.id());
  fetch_through(player, seg, bytes, now);
}

void EdgeCache::fetch_through(Player& player, SegmentId seg, std::uint64_t bytes,
                              SimTime t_request) {
  Player* p = &player;
  backhaul_->start_transfer(bytes, [this, p, seg, bytes, t_request](SimTime) {
    serve_over_radio(*p, seg, bytes, t_request, false);
  });
}

void EdgeCache::serve_over_radio(Player& player, SegmentId seg, std::uint64_t bytes,
                                 SimTime t_request, bool was_hit) {
  Player* p = &player;
  const SimTime t_radio_start = ev_->now();
  radio_->start_transfer(bytes, [this, p, seg, bytes, t_request, t_radio_start,
                                 was_hit](SimTime t) {
    on_served(*p, seg, bytes, t_request, t_radio_start, t, was_hit);
  });
}

void EdgeCache::on_served(Player& player, SegmentId seg, std::uint64_t bytes,
                          SimTime t_request, SimTime t_radio_start, SimTime t_delivered,
                          bool was_hit) {
  stats_.served_bytes += bytes;
  if (was_hit)
    stats_.hit_bytes += bytes;
  else
    stats_.miss_origin_bytes += bytes;

  // The proxy can only time its own serve leg: on a miss the origin fetch
  // happens before the radio transfer starts, so that delay is invisible to
  // this estimate (the player, timing request-to-delivery, does see it).
  Session& sess = session_for(player);
  const double dt = std::max(t_delivered - t_radio_start, 1e-9);
  const double measured = static_cast<double>(bytes) * 8.0 / 1e6 / dt;
  sess.bw_ewma = sess.has_bw
                     ? cfg_.ewma_alpha * measured + (1.0 - cfg_.ewma_alpha) * sess.bw_ewma
                     : measured;
  sess.has_bw = true;

  if (sess.has_prev) {
    FeatureVector fv;
    fv.bandwidth_mbps = sess.bw_ewma;
    fv.bitrate_mbps = manifest_->ladder()[static_cast<std::size_t>(seg.rep - 1)].bitrate_mbps;
    fv.seg_size_bytes = static_cast<double>(bytes);
    fv.download_time_s = t_delivered - t_request;
    fv.inter_request_time_s = t_request - sess.prev_req_time;
    fv.seg_index = static_cast<double>(seg.index);
    fv.prev_switch = static_cast<double>(seg.rep - sess.prev_rep);
    sess.pending_fv = fv;
    sess.pending_fv_index = seg.index;
    sess.has_pending_fv = true;
  }
  sess.prev_req_time = t_request;
  sess.prev_rep = seg.rep;
  sess.has_prev = true;

  player.on_delivered(seg, bytes, t_request, t_delivered);
  trigger_prefetch(player, seg.index + 1);
}

void EdgeCache::trigger_prefetch(Player& player, int index) {
  if (cfg_.strategy == Strategy::kLegacy) return;
  if (index > manifest_->segment_count()) return;
  if (cfg_.forecast_latency_s > 0.0) {
    Player* p = &player;
    ev_->schedule(ev_->now() + cfg_.forecast_latency_s,
                  [this, p, index] { start_prefetch(*p, index); });
  } else {
    start_prefetch(player, index);
  }
}

void EdgeCache::start_prefetch(Player& player, int index) {
  if (cfg_.strategy == Strategy::kPreemptive) {
    for (const auto& rep : manifest_->ladder()) prefetch_one({index, rep.index}, player.id());
    return;
  }
  // Predictive: a single representation from the oracle or the model. The
  // model needs a completed feature vector, so the first segment of a session
  // is never prefetched for.
  int rep = 0;
  if (oracle_) {
    rep = player.pending_rep();
    if (rep == 0) return;
  } else {
    Session& sess = session_for(player);
    if (!sess.has_pending_fv || sess.pending_fv_index + 1 != index) return;
    const double bitrate = predictor_->predict_next_bitrate(sess.pending_fv);
    rep = manifest_->rep_for_bitrate(bitrate);
  }
  prefetch_one({index, rep}, player.id());
}

void EdgeCache::prefetch_one(SegmentId seg, int player_id) {
  const SimTime now = ev_->now();
  const std::uint64_t bytes = sizer_->size_bytes(seg);

  auto it = entries_.find(seg);
  if (it != entries_.end()) {
    Entry& e = it->second;
    const bool live = !e.ready || now < e.expires_at;
    if (live) {
      // Already cached or being fetched: no duplicate origin transfer.
      append_log(now, "revalidate", seg, e.bytes, player_id);
      if (cfg_.prefetch_extends_ttl && e.ready) {
        e.expires_at = now + cfg_.ttl_s;
        arm_expiry(seg, e);
      }
      return;
    }
    ++stats_.evictions;
    append_log(now, "evict", seg, e.bytes, -1);
    entries_.erase(it);
  }

  Entry e;
  e.bytes = bytes;
  e.ready = false;
  entries_.emplace(seg, std::move(e));
  ++stats_.prefetch_count;
  append_log(now, "prefetch_start", seg, bytes, player_id);
  backhaul_->start_transfer(bytes,
                            [this, seg, player_id](SimTime) { on_prefetch_ready(seg, player_id); });
}

void EdgeCache::on_prefetch_ready(SegmentId seg, int player_id) {
  auto it = entries_.find(seg);
  if (it == entries_.end()) return;  // raced with an eviction; nothing to finish
  Entry& e = it->second;
  const SimTime now = ev_->now();
  e.ready = true;
  e.expires_at = now + cfg_.ttl_s;
  stats_.cached_bytes += e.bytes;
  append_log(now, "prefetch_ready", seg, e.bytes, player_id);
  arm_expiry(seg, e);

  auto waiters = std::move(e.waiters);
  e.waiters.clear();
  for (const auto& w : waiters) serve_over_radio(*w.player, seg, e.bytes, w.t_request, true);
}

void EdgeCache::arm_expiry(SegmentId seg, Entry& e) {
  const std::uint64_t gen = ++e.expiry_gen;
  const SimTime when = e.expires_at;
  ev_->schedule(when, [this, seg, gen] {
    auto it = entries_.find(seg);
    if (it == entries_.end()) return;
    Entry& entry = it->second;
    if (!entry.ready || entry.expiry_gen != gen) return;
    if (ev_->now() + 1e-12 < entry.expires_at) return;
    ++stats_.evictions;
    append_log(ev_->now(), "evict", seg, entry.bytes, -1);
    entries_.erase(it);
  });
}

}  // namespace edgesim
