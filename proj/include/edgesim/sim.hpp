// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <queue>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace edgesim {

/// Simulated time in seconds.
using SimTime = double;

/// Deterministic event queue with an embedded clock.
///
/// Events fire in (time, insertion sequence) order, so two events scheduled
/// for the same instant run in the order they were scheduled. Handlers may
/// schedule further events at or after the current clock.
class EventQueue {
 public:
  using Handler = std::function<void()>;

  SimTime now() const { return now_; }

  /// Schedules `fn` to run at time `at`. Scheduling in the past throws.
  void schedule(SimTime at, Handler fn) {
    if (at < now_) {
      throw std::logic_error("EventQueue::schedule: event at " + std::to_string(at) +
                             " is before current clock " + std::to_string(now_));
    }
    heap_.push(Entry{at, next_seq_++, std::move(fn)});
  }

  /// Runs all events with time <= t_end; the clock ends at t_end.
  /// Returns the number of events processed.
  std::size_t run_until(SimTime t_end) {
    if (t_end < now_) {
      throw std::logic_error("EventQueue::run_until: t_end before current clock");
    }
    std::size_t count = 0;
    while (!heap_.empty() && heap_.top().at <= t_end) {
      Entry e = heap_.top();
      heap_.pop();
      now_ = e.at;
      e.fn();
      ++count;
    }
    now_ = t_end;
    return count;
  }

  /// Runs until the queue drains; the clock ends at the last event's time.
  std::size_t run_all() {
    std::size_t count = 0;
    while (!heap_.empty()) {
      Entry e = heap_.top();
      heap_.pop();
      now_ = e.at;
      e.fn();
      ++count;
    }
    return count;
  }

  bool empty() const { return heap_.empty(); }
  std::size_t pending() const { return heap_.size(); }

 private:
  struct Entry {
    SimTime at;
    std::uint64_t seq;
    Handler fn;
  };
  struct Later {
    bool operator()(const Entry& a, const Entry& b) const {
      if (a.at != b.at) return a.at > b.at;
      return a.seq > b.seq;
    }
  };

  std::priority_queue<Entry, std::vector<Entry>, Later> heap_;
  SimTime now_ = 0.0;
  std::uint64_t next_seq_ = 0;
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace detail

/// Named random stream derived from a 64-bit seed.
///
/// The same (seed, stream) pair yields the same draw sequence on every
/// platform: the generator state comes from splitmix64 over the seed and a
/// hash of the stream label, and all variates are produced from raw 64-bit
/// engine output rather than std distributions.
class SeededRng {
 public:
  SeededRng(std::uint64_t seed, std::string_view stream) {
    std::uint64_t s = seed ^ detail::fnv1a64(stream);
    s0_ = detail::splitmix64(s);
    s1_ = detail::splitmix64(s);
    s2_ = detail::splitmix64(s);
    s3_ = detail::splitmix64(s);
    if ((s0_ | s1_ | s2_ | s3_) == 0) s0_ = 1;  // xoshiro state must be nonzero
  }

  /// Raw 64-bit draw (xoshiro256++).
  std::uint64_t next_u64() {
    auto rotl = [](std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); };
    std::uint64_t result = rotl(s0_ + s3_, 23) + s0_;
    std::uint64_t t = s1_ << 17;
    s2_ ^= s0_;
    s3_ ^= s1_;
    s1_ ^= s2_;
    s0_ ^= s3_;
    s2_ ^= t;
    s3_ = rotl(s3_, 45);
    return result;
  }

  /// Uniform double in [0, 1).
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, n). n must be positive.
  std::uint64_t uniform_below(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("uniform_below: n must be positive");
    // rejection sampling keeps the draw unbiased and portable
    std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t x;
    do {
      x = next_u64();
    } while (x >= limit);
    return x % n;
  }

 private:
  std::uint64_t s0_, s1_, s2_, s3_;
};

/// Deterministic uniform in [0,1) for a keyed draw, independent of call order.
inline double keyed_uniform01(std::uint64_t seed, std::uint64_t key_a, std::uint64_t key_b) {
  std::uint64_t s = seed + 0x9e3779b97f4a7c15ULL * (key_a + 1) + 0x517cc1b727220a95ULL * (key_b + 1);
  std::uint64_t m = detail::splitmix64(s);
  m ^= detail::splitmix64(s);
  return static_cast<double>(m >> 11) * 0x1.0p-53;
}

}  // namespace edgesim
