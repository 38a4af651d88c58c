// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "edgesim/sim.hpp"

namespace edgesim {

/// Piecewise-constant capacity over time. A constant link is a single point
/// at t = 0. Times must start at 0 and be strictly increasing; capacities
/// must be positive.
class CapacityTrace {
 public:
  struct Point {
    double time_s;
    double mbps;
  };

  explicit CapacityTrace(double constant_mbps)
      : CapacityTrace(std::vector<Point>{{0.0, constant_mbps}}) {}
  explicit CapacityTrace(std::vector<Point> points);

  /// Parses a two-column CSV with header `time_s,mbps`.
  static CapacityTrace from_csv_file(const std::string& path);

  double at(SimTime t) const;
  /// Next capacity change strictly after `t`; +infinity when none.
  SimTime next_change_after(SimTime t) const;

  const std::vector<Point>& points() const { return points_; }

 private:
  std::vector<Point> points_;
};

struct LinkSpec {
  CapacityTrace capacity;
  double rtt_s = 0.0;
};

/// Equal processor-sharing split of the link among active flows.
inline double fair_share_mbps(double capacity_mbps, std::size_t n_flows) {
  return n_flows == 0 ? capacity_mbps : capacity_mbps / static_cast<double>(n_flows);
}

/// Fluid link with equal-share (processor sharing) bandwidth allocation.
///
/// A transfer is charged the link RTT once up front, then drains its byte
/// count at capacity/n, with rates recomputed whenever a flow joins, a flow
/// completes, or a capacity breakpoint passes. Completion callbacks fire in
/// flow start order when several flows finish at the same instant.
class PsLink {
 public:
  PsLink(EventQueue& ev, LinkSpec spec);

  /// Starts a transfer; `on_complete` fires at delivery of the last byte.
  void start_transfer(std::uint64_t bytes, std::function<void(SimTime)> on_complete);

  std::size_t active_flows() const { return flows_.size(); }
  double capacity_now() const { return spec_.capacity.at(ev_->now()); }
  double rtt() const { return spec_.rtt_s; }
  /// Total bits drained so far, for conservation checks.
  double delivered_bits() const { return delivered_bits_; }

 private:
  struct Flow {
    std::uint64_t id;
    double bits_remaining;
    std::function<void(SimTime)> on_complete;
  };

  void join(Flow flow);
  void settle();
  void reschedule();
  void wake(std::uint64_t generation);

  EventQueue* ev_;
  LinkSpec spec_;
  std::vector<Flow> flows_;
  SimTime last_update_ = 0.0;
  std::uint64_t next_flow_id_ = 0;
  std::uint64_t generation_ = 0;
  double delivered_bits_ = 0.0;

  static constexpr double kDoneEpsilonBits = 1e-6;
};

}  // namespace edgesim
