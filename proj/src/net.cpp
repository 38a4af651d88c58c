// SPDX-License-Identifier: Apache-2.0
#include "edgesim/net.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace edgesim {

CapacityTrace::CapacityTrace(std::vector<Point> points) : points_(std::move(points)) {
  if (points_.empty()) throw std::invalid_argument("CapacityTrace: no points");
  if (points_.front().time_s != 0.0) {
    throw std::invalid_argument("CapacityTrace: first point must be at time 0");
  }
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (!(points_[i].mbps > 0.0)) {
      throw std::invalid_argument("CapacityTrace: capacity must be positive");
    }
    if (i > 0 && !(points_[i].time_s > points_[i - 1].time_s)) {
      throw std::invalid_argument("CapacityTrace: times must be strictly increasing");
    }
  }
}

CapacityTrace CapacityTrace::from_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open capacity trace: " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty capacity trace: " + path);
  if (line.size() && line.back() == '\r') line.pop_back();
  if (line != "time_s,mbps") {
    throw std::runtime_error("capacity trace " + path +
                             ": expected header 'time_s,mbps', got '" + line + "'");
  }
  std::vector<Point> pts;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.size() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string a, b;
    if (!std::getline(row, a, ',') || !std::getline(row, b)) {
      throw std::runtime_error("capacity trace " + path + ": bad row at line " +
                               std::to_string(lineno));
    }
    pts.push_back({std::stod(a), std::stod(b)});
  }
  return CapacityTrace(std::move(pts));
}

double CapacityTrace::at(SimTime t) const {
  double mbps = points_.front().mbps;
  for (const auto& p : points_) {
    if (p.time_s <= t) mbps = p.mbps;
    else break;
  }
  return mbps;
}

SimTime CapacityTrace::next_change_after(SimTime t) const {
  for (const auto& p : points_) {
    if (p.time_s > t) return p.time_s;
  }
  return std::numeric_limits<double>::infinity();
}

PsLink::PsLink(EventQueue& ev, LinkSpec spec) : ev_(&ev), spec_(std::move(spec)) {}

void PsLink::start_transfer(std::uint64_t bytes, std::function<void(SimTime)> on_complete) {
  Flow flow{next_flow_id_++, static_cast<double>(bytes) * 8.0, std::move(on_complete)};
  // RTT is charged once, before the data occupies the link.
  ev_->schedule(ev_->now() + spec_.rtt_s,
                [this, flow = std::move(flow)]() mutable { join(std::move(flow)); });
}

void PsLink::join(Flow flow) {
  settle();
  flows_.push_back(std::move(flow));
  reschedule();
}

void PsLink::settle() {
  SimTime now = ev_->now();
  double dt = now - last_update_;
  last_update_ = now;
  if (dt <= 0.0 || flows_.empty()) return;
  // Wakes are scheduled at every capacity breakpoint while flows are active,
  // so the capacity is constant across the settled interval.
  double rate_bps = fair_share_mbps(spec_.capacity.at(last_update_ - dt), flows_.size()) * 1e6;
  double drained = rate_bps * dt;
  for (auto& f : flows_) {
    double d = std::min(f.bits_remaining, drained);
    f.bits_remaining -= d;
    delivered_bits_ += d;
  }
}

void PsLink::reschedule() {
  ++generation_;
  if (flows_.empty()) return;
  SimTime now = ev_->now();
  double rate_bps = fair_share_mbps(spec_.capacity.at(now), flows_.size()) * 1e6;
  double min_bits = flows_.front().bits_remaining;
  for (const auto& f : flows_) min_bits = std::min(min_bits, f.bits_remaining);
  SimTime next = now + min_bits / rate_bps;
  // A residue below rate * ulp(now) would round the wake onto `now` itself and
  // settle zero bits forever; one representable tick is enough to drain it.
  if (next <= now) next = std::nextafter(now, std::numeric_limits<double>::infinity());
  SimTime breakpoint = spec_.capacity.next_change_after(now);
  if (breakpoint < next) next = breakpoint;
  std::uint64_t gen = generation_;
  ev_->schedule(next, [this, gen] { wake(gen); });
}

void PsLink::wake(std::uint64_t generation) {
  if (generation != generation_) return;  // superseded by a later state change
  settle();
  std::vector<Flow> done;
  std::size_t kept = 0;
  for (auto& f : flows_) {
    if (f.bits_remaining <= kDoneEpsilonBits) {
      done.push_back(std::move(f));
    } else {
      flows_[kept++] = std::move(f);
    }
  }
  flows_.resize(kept);
  reschedule();
  SimTime now = ev_->now();
  for (auto& f : done) f.on_complete(now);
}

}  // namespace edgesim
