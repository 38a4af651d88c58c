// SPDX-License-Identifier: Apache-2.0
#include "edgesim/scenario.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace edgesim {

using nlohmann::json;

double effective_ttl(const ScenarioConfig& cfg) {
  return cfg.ttl_s > 0.0 ? cfg.ttl_s : 2.0 * cfg.segment_duration_s;
}

Manifest manifest_from_config(const ScenarioConfig& cfg) {
  return Manifest(cfg.ladder, cfg.segment_duration_s, cfg.total_duration_s);
}

std::vector<std::string> validate_config(const ScenarioConfig& cfg) {
  std::vector<std::string> errors;
  auto bad = [&errors](const std::string& msg) { errors.push_back(msg); };

  if (cfg.ladder.empty()) bad("media.ladder: must contain at least one representation");
  for (std::size_t i = 0; i < cfg.ladder.size(); ++i) {
    const auto& r = cfg.ladder[i];
    const std::string at = "media.ladder[" + std::to_string(i) + "]";
    if (r.index != static_cast<int>(i) + 1) bad(at + ".index: must be " + std::to_string(i + 1));
    if (!(r.bitrate_mbps > 0.0)) bad(at + ".bitrate_mbps: must be > 0");
    if (i > 0 && !(r.bitrate_mbps > cfg.ladder[i - 1].bitrate_mbps))
      bad(at + ".bitrate_mbps: must exceed the previous rung");
    if (r.width <= 0 || r.height <= 0) bad(at + ": resolution must be positive");
    if (!(r.fps > 0.0)) bad(at + ".fps: must be > 0");
  }
  if (!(cfg.segment_duration_s > 0.0)) bad("media.segment_duration_s: must be > 0");
  if (!(cfg.total_duration_s >= cfg.segment_duration_s))
    bad("media.total_duration_s: must be >= one segment duration");
  if (!(cfg.size_jitter >= 0.0 && cfg.size_jitter < 0.5))
    bad("media.size_jitter: must be in [0, 0.5)");
  else if (cfg.ladder.size() >= 2 &&
           !SegmentSizer::jitter_preserves_rep_order(cfg.ladder, cfg.size_jitter))
    bad("media.size_jitter: too large, jittered sizes would reorder adjacent rungs");

  auto check_link = [&](const LinkSettings& l, const std::string& at) {
    if (l.capacity_trace_csv.empty() && !(l.capacity_mbps > 0.0))
      bad(at + ".capacity_mbps: must be > 0");
    if (!l.capacity_trace_csv.empty() &&
        !std::filesystem::exists(l.capacity_trace_csv))
      bad(at + ".capacity_trace_csv: file does not exist: " + l.capacity_trace_csv);
    if (!(l.rtt_s >= 0.0)) bad(at + ".rtt_s: must be >= 0");
  };
  check_link(cfg.radio, "radio");
  check_link(cfg.backhaul, "backhaul");

  if (cfg.player_count < 1) bad("players.count: must be >= 1");
  if (!(cfg.player.safety > 0.0 && cfg.player.safety <= 1.0))
    bad("players.safety: must be in (0, 1]");
  if (!(cfg.player.ewma_alpha > 0.0 && cfg.player.ewma_alpha <= 1.0))
    bad("players.ewma_alpha: must be in (0, 1]");
  if (cfg.player.startup_segments < 1) bad("players.startup_segments: must be >= 1");
  if (!(cfg.player.max_buffer_s > 0.0)) bad("players.max_buffer_s: must be > 0");
  if (cfg.player.max_buffer_s <
      static_cast<double>(cfg.player.startup_segments) * cfg.segment_duration_s)
    bad("players.max_buffer_s: must hold at least startup_segments segments");
  if (!(cfg.player.arrival_theta > 0.0)) bad("players.arrival_theta: must be > 0");
  if (!(cfg.player.arrival_lambda >= 0.0 && cfg.player.arrival_lambda < 1.0))
    bad("players.arrival_lambda: must be in [0, 1)");
  if (!(cfg.player.arrival_gap_unit_s > 0.0)) bad("players.arrival_gap_unit_s: must be > 0");

  if (!(cfg.ttl_s >= 0.0)) bad("cache.ttl_s: must be >= 0 (0 = 2 x segment duration)");
  if (!(cfg.forecast_latency_s >= 0.0)) bad("cache.forecast_latency_s: must be >= 0");

  if (cfg.hyper.rf_trees < 1) bad("forecast.rf_trees: must be >= 1");
  if (cfg.hyper.rf_max_depth < 0) bad("forecast.rf_max_depth: must be >= 0 (0 = unbounded)");
  if (cfg.hyper.rf_min_samples_leaf < 1) bad("forecast.rf_min_samples_leaf: must be >= 1");
  if (cfg.hyper.knn_neighbors < 1) bad("forecast.knn_neighbors: must be >= 1");
  if (!(cfg.train_fraction > 0.0 && cfg.train_fraction < 1.0))
    bad("forecast.train_fraction: must be in (0, 1)");

  if (!(cfg.qoe.stall_event_penalty >= 0.0)) bad("qoe.stall_event_penalty: must be >= 0");
  if (!(cfg.qoe.stall_second_penalty >= 0.0)) bad("qoe.stall_second_penalty: must be >= 0");
  if (!(cfg.qoe.stall_cap >= 0.0)) bad("qoe.stall_cap: must be >= 0");
  if (!(cfg.qoe.switch_event_penalty >= 0.0)) bad("qoe.switch_event_penalty: must be >= 0");
  if (!(cfg.qoe.switch_cap >= 0.0)) bad("qoe.switch_cap: must be >= 0");
  return errors;
}

namespace {

/// Strict object reader: typed lookups, unknown keys reported by path.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string path, std::vector<std::string>& errors)
      : j_(&j), path_(std::move(path)), errors_(&errors) {
    if (!j.is_object()) errors_->push_back(path_ + ": must be an object");
  }

  template <typename T>
  void get(const char* key, T& out) {
    if (!j_->is_object()) return;
    auto it = j_->find(key);
    if (it == j_->end()) return;
    seen_.insert(key);
    try {
      out = it->get<T>();
    } catch (const json::exception&) {
      errors_->push_back(path_ + "." + key + ": wrong type");
    }
  }

  const json* child(const char* key) {
    if (!j_->is_object()) return nullptr;
    auto it = j_->find(key);
    if (it == j_->end()) return nullptr;
    seen_.insert(key);
    return &*it;
  }

  void finish() {
    if (!j_->is_object()) return;
    for (auto it = j_->begin(); it != j_->end(); ++it) {
      if (!seen_.count(it.key())) errors_->push_back(path_ + "." + it.key() + ": unknown key");
    }
  }

 private:
  const json* j_;
  std::string path_;
  std::vector<std::string>* errors_;
  std::set<std::string> seen_;
};

}  // namespace

ScenarioConfig config_from_json(const json& j) {
  ScenarioConfig cfg;
  std::vector<std::string> errors;

  ObjectReader root(j, "config", errors);
  root.get("name", cfg.name);

  if (const json* media = root.child("media")) {
    ObjectReader m(*media, "media", errors);
    if (const json* ladder = m.child("ladder")) {
      if (!ladder->is_array() || ladder->empty()) {
        errors.push_back("media.ladder: must be a non-empty array");
      } else {
        cfg.ladder.clear();
        int i = 0;
        for (const auto& rj : *ladder) {
          Representation r;
          r.index = ++i;
          ObjectReader rr(rj, "media.ladder[" + std::to_string(i - 1) + "]", errors);
          rr.get("index", r.index);
          rr.get("codec", r.codec);
          rr.get("bitrate_mbps", r.bitrate_mbps);
          rr.get("width", r.width);
          rr.get("height", r.height);
          rr.get("fps", r.fps);
          rr.finish();
          cfg.ladder.push_back(r);
        }
      }
    }
    m.get("segment_duration_s", cfg.segment_duration_s);
    m.get("total_duration_s", cfg.total_duration_s);
    m.get("size_jitter", cfg.size_jitter);
    m.get("size_seed", cfg.size_seed);
    m.finish();
  }

  auto read_link = [&errors](const json* lj, const char* name, LinkSettings& out) {
    if (!lj) return;
    ObjectReader l(*lj, name, errors);
    l.get("capacity_mbps", out.capacity_mbps);
    l.get("capacity_trace_csv", out.capacity_trace_csv);
    l.get("rtt_s", out.rtt_s);
    l.finish();
  };
  read_link(root.child("radio"), "radio", cfg.radio);
  read_link(root.child("backhaul"), "backhaul", cfg.backhaul);

  if (const json* players = root.child("players")) {
    ObjectReader p(*players, "players", errors);
    p.get("count", cfg.player_count);
    p.get("safety", cfg.player.safety);
    p.get("ewma_alpha", cfg.player.ewma_alpha);
    p.get("startup_segments", cfg.player.startup_segments);
    p.get("max_buffer_s", cfg.player.max_buffer_s);
    p.get("arrival_theta", cfg.player.arrival_theta);
    p.get("arrival_lambda", cfg.player.arrival_lambda);
    p.get("arrival_gap_unit_s", cfg.player.arrival_gap_unit_s);
    p.finish();
  }

  if (const json* cache = root.child("cache")) {
    ObjectReader c(*cache, "cache", errors);
    c.get("ttl_s", cfg.ttl_s);
    c.get("prefetch_extends_ttl", cfg.prefetch_extends_ttl);
    c.get("forecast_latency_s", cfg.forecast_latency_s);
    c.finish();
  }

  if (const json* forecast = root.child("forecast")) {
    ObjectReader f(*forecast, "forecast", errors);
    f.get("rf_trees", cfg.hyper.rf_trees);
    f.get("rf_max_depth", cfg.hyper.rf_max_depth);
    f.get("rf_min_samples_leaf", cfg.hyper.rf_min_samples_leaf);
    f.get("knn_neighbors", cfg.hyper.knn_neighbors);
    f.get("train_fraction", cfg.train_fraction);
    f.finish();
  }

  if (const json* qoe = root.child("qoe")) {
    ObjectReader q(*qoe, "qoe", errors);
    q.get("stall_event_penalty", cfg.qoe.stall_event_penalty);
    q.get("stall_second_penalty", cfg.qoe.stall_second_penalty);
    q.get("stall_cap", cfg.qoe.stall_cap);
    q.get("switch_event_penalty", cfg.qoe.switch_event_penalty);
    q.get("switch_cap", cfg.qoe.switch_cap);
    q.finish();
  }
  root.finish();

  if (!errors.empty()) {
    std::ostringstream msg;
    msg << "invalid config:";
    for (const auto& e : errors) msg << "\n  - " << e;
    throw std::runtime_error(msg.str());
  }
  return cfg;
}

json config_to_json(const ScenarioConfig& cfg) {
  json ladder = json::array();
  for (const auto& r : cfg.ladder) {
    ladder.push_back({{"index", r.index},
                      {"codec", r.codec},
                      {"bitrate_mbps", r.bitrate_mbps},
                      {"width", r.width},
                      {"height", r.height},
                      {"fps", r.fps}});
  }
  return json{
      {"name", cfg.name},
      {"media",
       {{"ladder", std::move(ladder)},
        {"segment_duration_s", cfg.segment_duration_s},
        {"total_duration_s", cfg.total_duration_s},
        {"size_jitter", cfg.size_jitter},
        {"size_seed", cfg.size_seed}}},
      {"radio",
       {{"capacity_mbps", cfg.radio.capacity_mbps},
        {"capacity_trace_csv", cfg.radio.capacity_trace_csv},
        {"rtt_s", cfg.radio.rtt_s}}},
      {"backhaul",
       {{"capacity_mbps", cfg.backhaul.capacity_mbps},
        {"capacity_trace_csv", cfg.backhaul.capacity_trace_csv},
        {"rtt_s", cfg.backhaul.rtt_s}}},
      {"players",
       {{"count", cfg.player_count},
        {"safety", cfg.player.safety},
        {"ewma_alpha", cfg.player.ewma_alpha},
        {"startup_segments", cfg.player.startup_segments},
        {"max_buffer_s", cfg.player.max_buffer_s},
        {"arrival_theta", cfg.player.arrival_theta},
        {"arrival_lambda", cfg.player.arrival_lambda},
        {"arrival_gap_unit_s", cfg.player.arrival_gap_unit_s}}},
      {"cache",
       {{"ttl_s", cfg.ttl_s},
        {"prefetch_extends_ttl", cfg.prefetch_extends_ttl},
        {"forecast_latency_s", cfg.forecast_latency_s}}},
      {"forecast",
       {{"rf_trees", cfg.hyper.rf_trees},
        {"rf_max_depth", cfg.hyper.rf_max_depth},
        {"rf_min_samples_leaf", cfg.hyper.rf_min_samples_leaf},
        {"knn_neighbors", cfg.hyper.knn_neighbors},
        {"train_fraction", cfg.train_fraction}}},
      {"qoe",
       {{"stall_event_penalty", cfg.qoe.stall_event_penalty},
        {"stall_second_penalty", cfg.qoe.stall_second_penalty},
        {"stall_cap", cfg.qoe.stall_cap},
        {"switch_event_penalty", cfg.qoe.switch_event_penalty},
        {"switch_cap", cfg.qoe.switch_cap}}}};
}

ScenarioConfig load_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  json j;
  try {
    j = json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::exception& e) {
    throw std::runtime_error("config file " + path + ": " + e.what());
  }
  ScenarioConfig cfg = config_from_json(j);
  const auto errors = validate_config(cfg);
  if (!errors.empty()) {
    std::ostringstream msg;
    msg << "invalid config " << path << ":";
    for (const auto& e : errors) msg << "\n  - " << e;
    throw std::runtime_error(msg.str());
  }
  return cfg;
}

std::string config_hash(const ScenarioConfig& cfg) {
  const std::string dump = config_to_json(cfg).dump();
  const std::uint64_t h = detail::fnv1a64(dump);
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

}  // namespace edgesim
