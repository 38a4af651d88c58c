// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "edgesim/media.hpp"
#include "edgesim/sim.hpp"

namespace edgesim {

struct PlayerConfig {
  double safety = 0.9;           // fraction of the estimate the ABR may spend
  double ewma_alpha = 0.3;       // throughput estimator smoothing
  int startup_segments = 2;      // playback begins once this many are buffered
  double max_buffer_s = 20.0;
  // inter-arrival gaps: generalized Poisson draws scaled by gap_unit
  double arrival_theta = 2.0;
  double arrival_lambda = 0.2;
  double arrival_gap_unit_s = 1.0;
};

struct SegmentDownload {
  int index = 0;
  int rep = 0;
  double bitrate_mbps = 0.0;
  std::uint64_t bytes = 0;
  SimTime t_request = 0.0;
  SimTime t_delivered = 0.0;
};

struct StallEvent {
  SimTime start = 0.0;
  double duration_s = 0.0;
};

/// Per-session download/stall history, one record per played segment.
struct PlayerTrace {
  int player_id = 0;
  SimTime arrival = 0.0;
  std::vector<SegmentDownload> segments;
  std::vector<StallEvent> stalls;
};

/// Table-style per-player summary.
struct PlayerMetrics {
  int segments = 0;
  double r_avg_mbps = 0.0;       // mean selected bitrate
  double bitrate_dev_mbps = 0.0; // sample std of selected bitrate
  int switch_count = 0;          // S_n
  int stall_count = 0;           // Stall_n, startup excluded
  double stall_avg_s = 0.0;      // mean duration per stall event
  double stall_total_s = 0.0;
};

/// Arrival times for n players: the first at 0, then cumulative generalized
/// Poisson gaps.
std::vector<SimTime> arrivals(int n_players, const PlayerConfig& cfg, SeededRng& rng);

/// Highest representation whose bitrate fits within safety * estimate;
/// falls back to the lowest rung.
int abr_select(double est_mbps, const Manifest& manifest, const PlayerConfig& cfg);

PlayerMetrics player_metrics(const PlayerTrace& trace);

class Player;

/// Where player segment requests go (the cache proxy).
class RequestSink {
 public:
  virtual ~RequestSink() = default;
  virtual void request(Player& player, SegmentId seg) = 0;
};

/// A DASH player session: sequential segment requests, throughput-EWMA ABR,
/// buffer and stall dynamics.
///
/// The player keeps one request outstanding. After a delivery it requests the
/// next segment immediately, or, when the buffer lacks room for one more
/// segment, exactly when playback has drained enough room, so the buffer can
/// never overflow and delivered seconds are conserved as played + buffered.
class Player {
 public:
  Player(int id, EventQueue& ev, const Manifest& manifest, PlayerConfig cfg,
         RequestSink& sink);

  int id() const { return id_; }

  /// Call at the arrival time: issues the first request.
  void start();

  /// Delivery callback from the proxy. Segments must arrive in order.
  void on_delivered(SegmentId seg, std::uint64_t bytes, SimTime t_request,
                    SimTime t_delivered);

  bool finished() const { return finished_; }
  const PlayerTrace& trace() const { return trace_; }

  double throughput_estimate() const { return est_mbps_; }
  /// Representation chosen for the not-yet-issued next request (0 if none).
  int pending_rep() const { return pending_rep_; }
  int next_index() const { return next_index_; }

  double buffer_s() const { return buffer_s_; }
  double delivered_seconds() const { return delivered_s_; }
  double played_seconds() const { return played_s_; }

 private:
  void issue_request();
  void drain_to(SimTime t);

  int id_;
  EventQueue* ev_;
  const Manifest* manifest_;
  PlayerConfig cfg_;
  RequestSink* sink_;

  PlayerTrace trace_;
  int next_index_ = 1;
  int pending_rep_ = 0;
  double est_mbps_ = 0.0;
  bool have_est_ = false;

  double buffer_s_ = 0.0;
  double delivered_s_ = 0.0;
  double played_s_ = 0.0;
  SimTime last_drain_ = 0.0;
  bool playing_ = false;
  bool stalled_ = false;
  SimTime stall_start_ = 0.0;
  bool finished_ = false;
  int startup_target_;
};

}  // namespace edgesim
