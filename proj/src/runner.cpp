// SPDX-License-Identifier: Apache-2.0
#include "edgesim/runner.hpp"

#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>

namespace edgesim {

namespace {

CapacityTrace trace_for(const LinkSettings& link) {
  if (!link.capacity_trace_csv.empty()) return CapacityTrace::from_csv_file(link.capacity_trace_csv);
  return CapacityTrace(link.capacity_mbps);
}

}  // namespace

RunResult run_simulation(const ScenarioConfig& cfg, Strategy strategy, std::uint64_t seed,
                         const TrainedModel* model, bool oracle) {
  {
    const auto errors = validate_config(cfg);
    if (!errors.empty()) {
      std::ostringstream msg;
      msg << "run_simulation: invalid config:";
      for (const auto& e : errors) msg << "\n  - " << e;
      throw std::invalid_argument(msg.str());
    }
  }
  if (strategy == Strategy::kPredictive && !model && !oracle)
    throw std::invalid_argument("run_simulation: predictive strategy needs a model or oracle");

  const Manifest manifest = manifest_from_config(cfg);
  const SegmentSizer sizer(manifest, cfg.size_jitter, cfg.size_seed);

  EventQueue ev;
  PsLink radio(ev, {trace_for(cfg.radio), cfg.radio.rtt_s});
  PsLink backhaul(ev, {trace_for(cfg.backhaul), cfg.backhaul.rtt_s});

  CacheConfig ccfg;
  ccfg.strategy = strategy;
  ccfg.ttl_s = effective_ttl(cfg);
  ccfg.prefetch_extends_ttl = cfg.prefetch_extends_ttl;
  ccfg.forecast_latency_s = cfg.forecast_latency_s;
  ccfg.ewma_alpha = cfg.player.ewma_alpha;

  std::optional<ModelPredictor> predictor;
  if (strategy == Strategy::kPredictive && model && !oracle) predictor.emplace(*model);
  std::function<int(const Player&)> oracle_fn;
  if (strategy == Strategy::kPredictive && oracle)
    oracle_fn = [](const Player& p) { return p.pending_rep(); };

  EdgeCache cache(ev, manifest, sizer, backhaul, radio, ccfg,
                  predictor ? &*predictor : nullptr, oracle_fn);

  SeededRng arrival_rng(seed, "arrivals");
  const std::vector<SimTime> at = arrivals(cfg.player_count, cfg.player, arrival_rng);

  std::vector<std::unique_ptr<Player>> players;
  players.reserve(static_cast<std::size_t>(cfg.player_count));
  for (int i = 0; i < cfg.player_count; ++i) {
    players.push_back(std::make_unique<Player>(i + 1, ev, manifest, cfg.player, cache));
    Player* p = players.back().get();
    ev.schedule(at[static_cast<std::size_t>(i)], [p] { p->start(); });
  }

  ev.run_all();

  RunResult res;
  res.strategy = strategy;
  res.seed = seed;
  res.ttl_s = ccfg.ttl_s;
  res.end_time = ev.now();
  res.stats = cache.stats();
  res.cache_log = cache.event_log();
  res.records = cache.session_records();
  for (const auto& p : players) {
    if (!p->finished())
      throw std::runtime_error("run_simulation: player " + std::to_string(p->id()) +
                               " did not finish");
    res.traces.push_back(p->trace());
  }
  return res;
}

}  // namespace edgesim
