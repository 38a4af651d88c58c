// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "edgesim/media.hpp"
#include "edgesim/qoe.hpp"
#include "edgesim/sim.hpp"

using namespace edgesim;

namespace {

Manifest default_manifest() { return Manifest(default_ladder(), 4.0, 322.0); }

PlayerTrace flat_trace(int player_id, int segments, int rep, const Manifest& m) {
  PlayerTrace t;
  t.player_id = player_id;
  const double bitrate = m.ladder()[static_cast<std::size_t>(rep - 1)].bitrate_mbps;
  for (int i = 1; i <= segments; ++i) {
    t.segments.push_back({i, rep, bitrate, 1000, static_cast<double>(i), static_cast<double>(i) + 0.5});
  }
  return t;
}

PlayerTrace random_trace(SeededRng& rng, const Manifest& m) {
  PlayerTrace t;
  t.player_id = 1;
  const int n = 5 + static_cast<int>(rng.uniform_below(30));
  for (int i = 1; i <= n; ++i) {
    const int rep = 1 + static_cast<int>(rng.uniform_below(6));
    t.segments.push_back({i, rep, m.ladder()[static_cast<std::size_t>(rep - 1)].bitrate_mbps,
                          1000, static_cast<double>(i), static_cast<double>(i) + 0.2});
  }
  const int stalls = static_cast<int>(rng.uniform_below(4));
  for (int s = 0; s < stalls; ++s) {
    t.stalls.push_back({static_cast<double>(10 + s), 0.5 + 3.0 * rng.uniform01()});
  }
  return t;
}

}  // namespace

TEST_CASE("all top-rung segments with a clean session score a perfect 5") {
  Manifest m = default_manifest();
  PlayerTrace t = flat_trace(1, 20, 6, m);
  CHECK(qoe_score(t, m, QoEConfig{}) == 5.0);
}

TEST_CASE("all bottom-rung segments score exactly 1") {
  Manifest m = default_manifest();
  PlayerTrace t = flat_trace(1, 20, 1, m);
  CHECK(qoe_score(t, m, QoEConfig{}) == 1.0);
}

TEST_CASE("stall penalties subtract from a perfect session") {
  Manifest m = default_manifest();
  PlayerTrace t = flat_trace(1, 20, 6, m);
  t.stalls.push_back({10.0, 2.0});
  // one stall event (0.5) plus two stalled seconds (0.1)
  CHECK(qoe_score(t, m, QoEConfig{}) == doctest::Approx(4.4).epsilon(1e-12));
}

TEST_CASE("switch penalty: 0.01 per representation change") {
  Manifest m = default_manifest();
  PlayerTrace t = flat_trace(1, 20, 6, m);
  // drop one middle segment to rung 5: two switches, tiny quality dip
  t.segments[10].rep = 5;
  t.segments[10].bitrate_mbps = 20.0;
  const double q_drop = 4.0 * (1.0 - std::log(20.0 / 0.5) / std::log(27.5 / 0.5)) / 20.0;
  CHECK(qoe_score(t, m, QoEConfig{}) == doctest::Approx(5.0 - q_drop - 0.02).epsilon(1e-9));
}

TEST_CASE("penalties are capped") {
  Manifest m = default_manifest();
  PlayerTrace t = flat_trace(1, 20, 6, m);
  for (int i = 0; i < 50; ++i) t.stalls.push_back({static_cast<double>(i), 10.0});
  // uncapped this would be 50*0.5 + 500*0.05 = 50; the cap holds it at 1.5
  CHECK(qoe_score(t, m, QoEConfig{}) == doctest::Approx(3.5).epsilon(1e-12));

  PlayerTrace z = flat_trace(1, 60, 6, m);
  for (std::size_t i = 1; i < z.segments.size(); i += 2) {
    z.segments[i].rep = 5;
    z.segments[i].bitrate_mbps = 20.0;
  }
  // 59 switches would cost 0.59 uncapped; the cap holds it at 0.5
  const double quality =
      (30.0 * 1.0 + 30.0 * (std::log(20.0 / 0.5) / std::log(27.5 / 0.5))) / 60.0;
  CHECK(qoe_score(z, m, QoEConfig{}) == doctest::Approx(1.0 + 4.0 * quality - 0.5).epsilon(1e-9));
}

TEST_CASE("scores stay within [1, 5] on randomized traces") {
  Manifest m = default_manifest();
  SeededRng rng(31, "qoe-traces");
  for (int i = 0; i < 1000; ++i) {
    PlayerTrace t = random_trace(rng, m);
    const double s = qoe_score(t, m, QoEConfig{});
    CHECK(s >= 1.0);
    CHECK(s <= 5.0);
  }
}

TEST_CASE("adding a stall never raises the score") {
  Manifest m = default_manifest();
  SeededRng rng(32, "qoe-mono-stall");
  for (int i = 0; i < 200; ++i) {
    PlayerTrace t = random_trace(rng, m);
    const double before = qoe_score(t, m, QoEConfig{});
    t.stalls.push_back({50.0, 1.0 + rng.uniform01()});
    CHECK(qoe_score(t, m, QoEConfig{}) <= before + 1e-12);
  }
}

TEST_CASE("raising one segment's bitrate, switches aside, never lowers the score") {
  Manifest m = default_manifest();
  SeededRng rng(33, "qoe-mono-rate");
  int upgrades = 0;
  for (int i = 0; i < 400 && upgrades < 200; ++i) {
    PlayerTrace t = random_trace(rng, m);
    const std::size_t pick = rng.uniform_below(t.segments.size());
    if (t.segments[pick].rep == 6) continue;
    // lift every segment at or below the picked one's rung by one rung, so
    // the switch count cannot grow
    const int from = t.segments[pick].rep;
    PlayerTrace up = t;
    for (auto& s : up.segments) {
      if (s.rep == from) {
        s.rep = from + 1;
        s.bitrate_mbps = m.ladder()[static_cast<std::size_t>(s.rep - 1)].bitrate_mbps;
      }
    }
    ++upgrades;
    CHECK(qoe_score(up, m, QoEConfig{}) >= qoe_score(t, m, QoEConfig{}) - 1e-12);
  }
  CHECK(upgrades >= 100);
}

TEST_CASE("single-rung ladder counts every segment as full quality") {
  Manifest m(std::vector<Representation>{{1, "hevc", 5.0, 1280, 720, 24.0}}, 4.0, 20.0);
  PlayerTrace t = flat_trace(1, 5, 1, m);
  CHECK(qoe_score(t, m, QoEConfig{}) == 5.0);
}

TEST_CASE("empty trace is rejected") {
  Manifest m = default_manifest();
  CHECK_THROWS_AS(qoe_score(PlayerTrace{}, m, QoEConfig{}), std::invalid_argument);
}

TEST_CASE("aggregate report means and sample deviations") {
  Manifest m = default_manifest();
  // three identical-quality players except for rung choice: 6, 6, and 5
  std::vector<PlayerTrace> traces = {flat_trace(1, 10, 6, m), flat_trace(2, 10, 6, m),
                                     flat_trace(3, 10, 5, m)};
  CacheStats cache;
  cache.requests = 30;
  cache.hits = 24;
  cache.served_bytes = 1000;
  cache.cached_bytes = 400;

  StrategyReport r = aggregate_report(Strategy::kPreemptive, traces, cache, m, QoEConfig{});
  CHECK(r.cache_active);
  CHECK(r.hit_ratio == doctest::Approx(0.8));
  CHECK(r.data_saved_percent == doctest::Approx(60.0));
  CHECK(r.player_count == 3);
  REQUIRE(r.players.size() == 3);

  // r_avg over players: 27.5, 27.5, 20.0
  CHECK(r.r_avg_mean == doctest::Approx(25.0));
  CHECK(r.r_avg_dev == doctest::Approx(4.330127019).epsilon(1e-9));
  CHECK(r.switch_mean == 0.0);
  CHECK(r.stall_count_mean == 0.0);

  const double q5 = 1.0 + 4.0 * std::log(20.0 / 0.5) / std::log(27.5 / 0.5);
  CHECK(r.players[2].qoe == doctest::Approx(q5).epsilon(1e-12));
  CHECK(r.qoe_mean == doctest::Approx((5.0 + 5.0 + q5) / 3.0).epsilon(1e-12));

  // legacy: cache columns stay inert even with the same counter values
  StrategyReport leg = aggregate_report(Strategy::kLegacy, traces, cache, m, QoEConfig{});
  CHECK_FALSE(leg.cache_active);
  CHECK(leg.hit_ratio == 0.0);
  CHECK(leg.data_saved_percent == 0.0);

  CHECK_THROWS_AS(aggregate_report(Strategy::kLegacy, {}, cache, m, QoEConfig{}),
                  std::invalid_argument);
}

TEST_CASE("single-player aggregates have zero deviation") {
  Manifest m = default_manifest();
  std::vector<PlayerTrace> traces = {flat_trace(1, 10, 4, m)};
  StrategyReport r = aggregate_report(Strategy::kLegacy, traces, CacheStats{}, m, QoEConfig{});
  CHECK(r.r_avg_dev == 0.0);
  CHECK(r.qoe_dev == 0.0);
  CHECK(r.r_avg_mean == doctest::Approx(11.0));
}
