// SPDX-License-Identifier: Apache-2.0
#include "edgesim/player.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "edgesim/gen_poisson.hpp"

namespace edgesim {

std::vector<SimTime> arrivals(int n_players, const PlayerConfig& cfg, SeededRng& rng) {
  if (n_players < 1) throw std::invalid_argument("arrivals: n_players must be >= 1");
  GeneralizedPoisson gp(cfg.arrival_theta, cfg.arrival_lambda);
  std::vector<SimTime> out;
  out.reserve(static_cast<std::size_t>(n_players));
  SimTime t = 0.0;
  out.push_back(t);
  for (int i = 1; i < n_players; ++i) {
    t += static_cast<double>(gp.sample(rng)) * cfg.arrival_gap_unit_s;
    out.push_back(t);
  }
  return out;
}

int abr_select(double est_mbps, const Manifest& manifest, const PlayerConfig& cfg) {
  if (!(est_mbps >= 0.0)) throw std::invalid_argument("abr_select: estimate must be >= 0");
  const double budget = cfg.safety * est_mbps;
  int chosen = 1;
  for (const auto& rep : manifest.ladder()) {
    if (rep.bitrate_mbps <= budget) chosen = rep.index;
  }
  return chosen;
}

PlayerMetrics player_metrics(const PlayerTrace& trace) {
  if (trace.segments.empty()) throw std::invalid_argument("player_metrics: empty trace");
  PlayerMetrics m;
  m.segments = static_cast<int>(trace.segments.size());

  double sum = 0.0;
  for (const auto& s : trace.segments) sum += s.bitrate_mbps;
  m.r_avg_mbps = sum / static_cast<double>(m.segments);

  if (m.segments > 1) {
    double ss = 0.0;
    for (const auto& s : trace.segments) {
      const double d = s.bitrate_mbps - m.r_avg_mbps;
      ss += d * d;
    }
    m.bitrate_dev_mbps = std::sqrt(ss / static_cast<double>(m.segments - 1));
  }

  for (std::size_t i = 1; i < trace.segments.size(); ++i) {
    if (trace.segments[i].rep != trace.segments[i - 1].rep) ++m.switch_count;
  }

  m.stall_count = static_cast<int>(trace.stalls.size());
  for (const auto& st : trace.stalls) m.stall_total_s += st.duration_s;
  if (m.stall_count > 0) m.stall_avg_s = m.stall_total_s / static_cast<double>(m.stall_count);
  return m;
}

Player::Player(int id, EventQueue& ev, const Manifest& manifest, PlayerConfig cfg,
               RequestSink& sink)
    : id_(id), ev_(&ev), manifest_(&manifest), cfg_(cfg), sink_(&sink) {
  trace_.player_id = id;
  startup_target_ = std::min(cfg_.startup_segments, manifest_->segment_count());
}

void Player::start() {
  trace_.arrival = ev_->now();
  last_drain_ = ev_->now();
  pending_rep_ = 1;  // no estimate yet: begin at the lowest rung
  issue_request();
}

void Player::issue_request() {
  drain_to(ev_->now());
  sink_->request(*this, SegmentId{next_index_, pending_rep_});
}

void Player::drain_to(SimTime t) {
  if (playing_ && !stalled_) {
    const double wall = t - last_drain_;
    if (buffer_s_ >= wall) {
      buffer_s_ -= wall;
      played_s_ += wall;
    } else {
      // Ran dry mid-interval: the stall starts when the buffer hit zero.
      stall_start_ = last_drain_ + buffer_s_;
      played_s_ += buffer_s_;
      buffer_s_ = 0.0;
      stalled_ = true;
    }
  }
  last_drain_ = t;
}

void Player::on_delivered(SegmentId seg, std::uint64_t bytes, SimTime t_request,
                          SimTime t_delivered) {
  if (seg.index != next_index_ || finished_)
    throw std::logic_error("Player::on_delivered: out-of-order delivery");

  drain_to(t_delivered);
  if (stalled_) {
    trace_.stalls.push_back({stall_start_, t_delivered - stall_start_});
    stalled_ = false;
  }

  const double dt = std::max(t_delivered - t_request, 1e-9);
  const double measured = static_cast<double>(bytes) * 8.0 / 1e6 / dt;
  est_mbps_ = have_est_ ? cfg_.ewma_alpha * measured + (1.0 - cfg_.ewma_alpha) * est_mbps_
                        : measured;
  have_est_ = true;

  const double seg_s = manifest_->duration_of(seg.index);
  buffer_s_ += seg_s;
  delivered_s_ += seg_s;

  trace_.segments.push_back({seg.index, seg.rep,
                             manifest_->ladder()[static_cast<std::size_t>(seg.rep - 1)].bitrate_mbps,
                             bytes, t_request, t_delivered});

  if (!playing_ && static_cast<int>(trace_.segments.size()) >= startup_target_) {
    playing_ = true;
    last_drain_ = t_delivered;
  }

  if (next_index_ == manifest_->segment_count()) {
    finished_ = true;
    pending_rep_ = 0;
    return;
  }

  ++next_index_;
  pending_rep_ = abr_select(est_mbps_, *manifest_, cfg_);

  // Hold the request until the buffer has room for the incoming segment.
  const double room = cfg_.max_buffer_s - manifest_->duration_of(next_index_);
  SimTime t_next = t_delivered;
  if (playing_ && buffer_s_ > room) t_next = t_delivered + (buffer_s_ - room);
  ev_->schedule(t_next, [this] { issue_request(); });
}

}  // namespace edgesim
