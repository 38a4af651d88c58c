// SPDX-License-Identifier: Apache-2.0
#include "edgesim/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "edgesim/io.hpp"
#include "edgesim/runner.hpp"

namespace edgesim::cli {

namespace fs = std::filesystem;
using nlohmann::json;

ScenarioConfig resolve_config(const std::string& config_path) {
  if (config_path.empty()) return ScenarioConfig{};
  return load_config_file(config_path);
}

std::vector<std::uint64_t> parse_seeds(const std::string& spec) {
  auto parse_one = [&spec](const std::string& tok) {
    try {
      std::size_t pos = 0;
      const unsigned long long v = std::stoull(tok, &pos);
      if (pos != tok.size()) throw std::invalid_argument("junk");
      return static_cast<std::uint64_t>(v);
    } catch (const std::exception&) {
      throw std::runtime_error("bad seed spec '" + spec + "': cannot parse '" + tok + "'");
    }
  };

  std::vector<std::uint64_t> out;
  std::stringstream ss(spec);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) throw std::runtime_error("bad seed spec '" + spec + "': empty element");
    const auto dots = tok.find("..");
    if (dots != std::string::npos) {
      const std::uint64_t lo = parse_one(tok.substr(0, dots));
      const std::uint64_t hi = parse_one(tok.substr(dots + 2));
      if (hi < lo) throw std::runtime_error("bad seed spec '" + spec + "': descending range");
      for (std::uint64_t s = lo; s <= hi; ++s) out.push_back(s);
    } else {
      out.push_back(parse_one(tok));
    }
  }
  if (out.empty()) throw std::runtime_error("bad seed spec '" + spec + "': no seeds");
  std::set<std::uint64_t> uniq(out.begin(), out.end());
  if (uniq.size() != out.size())
    throw std::runtime_error("bad seed spec '" + spec + "': duplicate seeds");
  return out;
}

std::string default_out_dir(const std::string& command) {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y%m%d-%H%M%S", &tm);
  return "out/" + command + "-" + buf;
}

namespace {

std::string seeds_label(const std::vector<std::uint64_t>& seeds) {
  std::string s;
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(seeds[i]);
  }
  return s;
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory " + dir + ": " + ec.message());
}

json run_meta(const ScenarioConfig& cfg, const std::string& seeds) {
  return json{{"config_hash", config_hash(cfg)}, {"seeds", seeds}, {"config", config_to_json(cfg)}};
}

CacheStats& operator+=(CacheStats& a, const CacheStats& b) {
  a.requests += b.requests;
  a.hits += b.hits;
  a.served_bytes += b.served_bytes;
  a.hit_bytes += b.hit_bytes;
  a.miss_origin_bytes += b.miss_origin_bytes;
  a.cached_bytes += b.cached_bytes;
  a.prefetch_count += b.prefetch_count;
  a.evictions += b.evictions;
  return a;
}

}  // namespace

void cmd_simulate(const ScenarioConfig& cfg, Strategy strategy, std::uint64_t seed,
                  const std::string& out_dir, const std::string& model_path, bool oracle) {
  TrainedModel model;
  const TrainedModel* model_ptr = nullptr;
  if (strategy == Strategy::kPredictive && !oracle) {
    if (model_path.empty())
      throw std::runtime_error("predictive strategy needs --model <file> or --oracle");
    model = load_model(model_path);
    model_ptr = &model;
  }

  const RunResult run = run_simulation(cfg, strategy, seed, model_ptr, oracle);
  const Manifest manifest = manifest_from_config(cfg);
  const StrategyReport report =
      aggregate_report(strategy, run.traces, run.stats, manifest, cfg.qoe);

  ensure_dir(out_dir);
  const ArtifactMeta meta{config_hash(cfg), std::to_string(seed)};
  write_cache_events_csv(out_dir + "/cache_events.csv", run.cache_log, meta);
  write_player_traces_csv(out_dir + "/player_traces.csv", run.traces, meta);
  write_stalls_csv(out_dir + "/stalls.csv", run.traces, meta);
  write_player_metrics_csv(out_dir + "/player_metrics.csv", report, meta);
  write_text_file(out_dir + "/report.json", report_to_json_text({report}, meta));
  write_text_file(out_dir + "/report.txt", format_report_table({report}));

  json j = run_meta(cfg, meta.seeds);
  j["strategy"] = to_string(strategy);
  j["oracle"] = oracle;
  j["ttl_s"] = run.ttl_s;
  j["end_time_s"] = run.end_time;
  if (!model_path.empty()) j["model_path"] = model_path;
  write_text_file(out_dir + "/run_meta.json", j.dump(2) + "\n");

  std::cout << "simulate " << to_string(strategy) << " seed " << seed << ": "
            << run.traces.size() << " players, " << run.stats.requests << " requests, "
            << (strategy == Strategy::kLegacy
                    ? std::string("no cache")
                    : "hit_ratio " + format_double(hit_ratio(run.stats)))
            << "\n  artifacts: " << out_dir << "\n";
}

void cmd_gen_dataset(const ScenarioConfig& cfg, const std::vector<std::uint64_t>& seeds,
                     const std::string& out_dir) {
  if (seeds.empty()) throw std::runtime_error("gen-dataset: need at least one seed");

  std::vector<DatasetRow> rows;
  for (std::uint64_t seed : seeds) {
    const RunResult run = run_simulation(cfg, Strategy::kLegacy, seed);
    for (const auto& rec : run.records) rows.push_back({seed, rec.player_id, rec.record});
  }

  ensure_dir(out_dir);
  const ArtifactMeta meta{config_hash(cfg), seeds_label(seeds)};
  write_dataset_csv(out_dir + "/dataset.csv", rows, meta);

  json j = run_meta(cfg, meta.seeds);
  j["rows"] = rows.size();
  write_text_file(out_dir + "/dataset_meta.json", j.dump(2) + "\n");

  std::cout << "gen-dataset: " << rows.size() << " records from " << seeds.size()
            << " legacy runs\n  artifacts: " << out_dir << "\n";
}

void cmd_train(const ScenarioConfig& cfg, const std::string& dataset_path, ModelKind kind,
               std::uint64_t train_seed, std::uint64_t split_seed, const std::string& out_dir) {
  const Dataset data = read_dataset_csv(dataset_path);
  const SplitIndices split = stratified_split(data.y, cfg.train_fraction, split_seed);
  TrainedModel model = train_model(data, split.train, kind, cfg.hyper, train_seed);
  model.split_seed = split_seed;

  ensure_dir(out_dir);
  const std::string model_path = out_dir + "/model_" + to_string(kind) + ".json";
  save_model(model, model_path);

  std::cout << "train " << to_string(kind) << ": " << split.train.size() << " train / "
            << split.test.size() << " held-out rows, " << model.labels.size()
            << " classes\n  model: " << model_path << "\n";
}

void cmd_evaluate(const ScenarioConfig& cfg, const std::string& dataset_path,
                  const std::string& model_path, const std::string& out_dir) {
  const Dataset data = read_dataset_csv(dataset_path);
  const TrainedModel model = load_model(model_path);
  if (!model.dataset_hash.empty() && model.dataset_hash != dataset_hash(data)) {
    std::cout << "note: dataset differs from the one the model was trained on\n";
  }
  const SplitIndices split = stratified_split(data.y, cfg.train_fraction, model.split_seed);
  const EvalResult eval = evaluate_model(model, data, split.test);
  const auto corr = correlation_matrix(data);

  ensure_dir(out_dir);
  const ArtifactMeta meta{config_hash(cfg), std::to_string(model.split_seed)};
  write_confusion_csv(out_dir + "/confusion.csv", eval.confusion, meta);
  write_correlation_csv(out_dir + "/correlation.csv", corr, meta);

  const bool gate = eval.accuracy >= 0.75;
  json j;
  j["model"] = to_string(model.kind);
  j["model_path"] = model_path;
  j["dataset_path"] = dataset_path;
  j["dataset_hash"] = dataset_hash(data);
  j["config_hash"] = config_hash(cfg);
  j["test_rows"] = eval.n;
  j["accuracy"] = eval.accuracy;
  j["majority_baseline"] = eval.majority_baseline;
  j["accuracy_gate_075"] = gate;
  write_text_file(out_dir + "/evaluation.json", j.dump(2) + "\n");

  char acc[64];
  std::snprintf(acc, sizeof acc, "%.4f", eval.accuracy);
  char maj[64];
  std::snprintf(maj, sizeof maj, "%.4f", eval.majority_baseline);
  std::cout << "evaluate " << to_string(model.kind) << ": accuracy " << acc << " on " << eval.n
            << " held-out rows (majority baseline " << maj << ")\n  75% gate: "
            << (gate ? "PASS" : "FAIL") << "\n  artifacts: " << out_dir << "\n";
}

void cmd_compare(const ScenarioConfig& cfg, const std::vector<std::uint64_t>& seeds,
                 const std::string& model_path, bool oracle, const std::string& out_dir) {
  if (seeds.empty()) throw std::runtime_error("compare: need at least one seed");
  TrainedModel model;
  const TrainedModel* model_ptr = nullptr;
  if (!oracle) {
    if (model_path.empty())
      throw std::runtime_error("compare needs --model <file> or --oracle for the predictive run");
    model = load_model(model_path);
    model_ptr = &model;
  }

  const Manifest manifest = manifest_from_config(cfg);
  const ArtifactMeta meta{config_hash(cfg), seeds_label(seeds)};
  constexpr Strategy kOrder[] = {Strategy::kLegacy, Strategy::kPreemptive, Strategy::kPredictive};

  std::vector<StrategyReport> pooled;
  json per_seed = json::array();
  std::ostringstream per_player;
  per_player << "# config_hash=" << meta.config_hash << " seeds=" << meta.seeds << "\n";
  per_player << "strategy,run_seed,player_id,r_avg_mbps,bitrate_dev_mbps,qoe\n";

  for (Strategy strategy : kOrder) {
    std::vector<PlayerTrace> traces;
    CacheStats stats;
    for (std::uint64_t seed : seeds) {
      const RunResult run =
          run_simulation(cfg, strategy, seed,
                         strategy == Strategy::kPredictive ? model_ptr : nullptr,
                         strategy == Strategy::kPredictive && oracle);
      const StrategyReport seed_report =
          aggregate_report(strategy, run.traces, run.stats, manifest, cfg.qoe);
      json sj = strategy_summary_json(seed_report);
      sj["seed"] = seed;
      per_seed.push_back(std::move(sj));
      for (const auto& p : seed_report.players) {
        per_player << to_string(strategy) << ',' << seed << ',' << p.player_id << ','
             << format_double(p.metrics.r_avg_mbps) << ','
             << format_double(p.metrics.bitrate_dev_mbps) << ',' << format_double(p.qoe)
             << '\n';
      }
      for (const auto& t : run.traces) traces.push_back(t);
      stats += run.stats;
    }
    pooled.push_back(aggregate_report(strategy, traces, stats, manifest, cfg.qoe));
  }

  ensure_dir(out_dir);
  json j = run_meta(cfg, meta.seeds);
  j["oracle"] = oracle;
  if (!model_path.empty()) j["model_path"] = model_path;
  j["pooled"] = json::parse(report_to_json_text(pooled, meta));
  j["per_seed"] = std::move(per_seed);
  write_text_file(out_dir + "/compare.json", j.dump(2) + "\n");
  write_text_file(out_dir + "/compare.txt", format_report_table(pooled));
  write_text_file(out_dir + "/per_player.csv", per_player.str());

  std::cout << format_report_table(pooled) << "  artifacts: " << out_dir << "\n";
}

}  // namespace edgesim::cli
