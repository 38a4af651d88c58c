// SPDX-License-Identifier: Apache-2.0
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "edgesim/commands.hpp"
#include "edgesim/gen_poisson.hpp"
#include "edgesim/io.hpp"
#include "edgesim/runner.hpp"

namespace py = pybind11;
using nlohmann::json;

namespace {

using namespace edgesim;

ScenarioConfig config_from_text(const std::string& config_json) {
  const json j = json::parse(config_json, nullptr, true, /*ignore_comments=*/true);
  ScenarioConfig cfg = config_from_json(j);
  const auto errors = validate_config(cfg);
  if (!errors.empty()) {
    std::string msg = "invalid config:";
    for (const auto& e : errors) msg += "\n  - " + e;
    throw std::runtime_error(msg);
  }
  return cfg;
}

std::string default_config_json() { return config_to_json(ScenarioConfig{}).dump(2); }

std::vector<std::string> validate_config_text(const std::string& config_json) {
  const json j = json::parse(config_json, nullptr, true, true);
  return validate_config(config_from_json(j));
}

std::string run_simulation_json(const std::string& config_json, const std::string& strategy,
                                std::uint64_t seed, const std::string& model_path, bool oracle) {
  const ScenarioConfig cfg = config_from_text(config_json);
  const Strategy strat = strategy_from_string(strategy);

  TrainedModel model;
  const TrainedModel* model_ptr = nullptr;
  if (strat == Strategy::kPredictive && !oracle) {
    if (model_path.empty())
      throw std::runtime_error("predictive strategy needs model_path or oracle=True");
    model = load_model(model_path);
    model_ptr = &model;
  }

  const RunResult run = run_simulation(cfg, strat, seed, model_ptr, oracle);
  const Manifest manifest = manifest_from_config(cfg);
  const StrategyReport report = aggregate_report(strat, run.traces, run.stats, manifest, cfg.qoe);

  json j = json::parse(report_to_json_text({report}, {config_hash(cfg), std::to_string(seed)}));
  j["seed"] = seed;
  j["ttl_s"] = run.ttl_s;
  j["end_time_s"] = run.end_time;
  j["oracle"] = oracle;
  return j.dump();
}

std::size_t gen_dataset_csv(const std::string& config_json,
                            const std::vector<std::uint64_t>& seeds,
                            const std::string& out_csv) {
  const ScenarioConfig cfg = config_from_text(config_json);
  if (seeds.empty()) throw std::runtime_error("gen_dataset: need at least one seed");
  std::vector<DatasetRow> rows;
  std::string label;
  for (std::uint64_t seed : seeds) {
    const RunResult run = run_simulation(cfg, Strategy::kLegacy, seed);
    for (const auto& rec : run.records) rows.push_back({seed, rec.player_id, rec.record});
    if (!label.empty()) label += ',';
    label += std::to_string(seed);
  }
  write_dataset_csv(out_csv, rows, {config_hash(cfg), label});
  return rows.size();
}

void train_model_file(const std::string& config_json, const std::string& dataset_csv,
                      const std::string& kind, std::uint64_t train_seed,
                      std::uint64_t split_seed, const std::string& out_model) {
  const ScenarioConfig cfg = config_from_text(config_json);
  const Dataset data = read_dataset_csv(dataset_csv);
  const SplitIndices split = stratified_split(data.y, cfg.train_fraction, split_seed);
  TrainedModel model =
      train_model(data, split.train, model_kind_from_string(kind), cfg.hyper, train_seed);
  model.split_seed = split_seed;
  save_model(model, out_model);
}

std::string evaluate_model_json(const std::string& config_json, const std::string& dataset_csv,
                                const std::string& model_path) {
  const ScenarioConfig cfg = config_from_text(config_json);
  const Dataset data = read_dataset_csv(dataset_csv);
  const TrainedModel model = load_model(model_path);
  const SplitIndices split = stratified_split(data.y, cfg.train_fraction, model.split_seed);
  const EvalResult eval = evaluate_model(model, data, split.test);
  json j;
  j["model"] = to_string(model.kind);
  j["test_rows"] = eval.n;
  j["accuracy"] = eval.accuracy;
  j["majority_baseline"] = eval.majority_baseline;
  j["accuracy_gate_075"] = eval.accuracy >= 0.75;
  return j.dump();
}

double predict_from_model(const std::string& model_path,
                          const std::array<double, FeatureVector::kDim>& features) {
  const TrainedModel model = load_model(model_path);
  return model.predict(features);
}

std::vector<std::uint64_t> gp_samples(double theta, double lambda, std::uint64_t seed,
                                      std::size_t n) {
  GeneralizedPoisson gp(theta, lambda);
  SeededRng rng(seed, "py-gp");
  std::vector<std::uint64_t> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(gp.sample(rng));
  return out;
}

}  // namespace

PYBIND11_MODULE(_edgesim, m) {
  m.doc() = "DASH edge-cache simulator core";

  m.def("default_config_json", &default_config_json,
        "Built-in default scenario as a JSON string.");
  m.def("validate_config_json", &validate_config_text, py::arg("config_json"),
        "Validation error messages for a config (empty list = valid).");
  m.def("run_simulation_json", &run_simulation_json, py::arg("config_json"), py::arg("strategy"),
        py::arg("seed") = 1, py::arg("model_path") = "", py::arg("oracle") = false,
        "Run one simulation; returns the strategy report as a JSON string.");
  m.def("gen_dataset_csv", &gen_dataset_csv, py::arg("config_json"), py::arg("seeds"),
        py::arg("out_csv"), "Generate a training dataset from legacy runs; returns row count.");
  m.def("train_model_file", &train_model_file, py::arg("config_json"), py::arg("dataset_csv"),
        py::arg("kind"), py::arg("train_seed"), py::arg("split_seed"), py::arg("out_model"),
        "Train a classifier and write the model file.");
  m.def("evaluate_model_json", &evaluate_model_json, py::arg("config_json"),
        py::arg("dataset_csv"), py::arg("model_path"),
        "Evaluate a model on the held-out split; returns JSON.");
  m.def("predict_from_model", &predict_from_model, py::arg("model_path"), py::arg("features"),
        "Predict the next-segment bitrate for a 7-feature vector.");
  m.def("gp_samples", &gp_samples, py::arg("theta"), py::arg("lambda_"), py::arg("seed"),
        py::arg("n"), "Draw n generalized Poisson samples.");
}
