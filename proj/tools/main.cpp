// SPDX-License-Identifier: Apache-2.0
#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "edgesim/commands.hpp"

namespace {

using namespace edgesim;

struct CommonOpts {
  std::string config;
  std::string out;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--config", opts.config, "scenario config file (JSON, comments allowed)")
      ->check(CLI::ExistingFile);
  cmd->add_option("--out", opts.out, "output directory (default: out/<command>-<timestamp>)");
}

std::string out_or_default(const CommonOpts& opts, const std::string& command) {
  return opts.out.empty() ? cli::default_out_dir(command) : opts.out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"edgesim: DASH streaming through an edge cache proxy, with forecast-driven prefetch"};
  app.require_subcommand(1);

  CommonOpts sim_opts;
  std::string sim_strategy = "legacy";
  std::uint64_t sim_seed = 1;
  std::string sim_model;
  bool sim_oracle = false;
  auto* sim = app.add_subcommand("simulate", "run one simulation under a strategy");
  add_common(sim, sim_opts);
  sim->add_option("--strategy", sim_strategy, "legacy | preemptive | predictive")->required();
  sim->add_option("--seed", sim_seed, "run seed (default 1)");
  sim->add_option("--model", sim_model, "trained model file (predictive)")
      ->check(CLI::ExistingFile);
  sim->add_flag("--oracle", sim_oracle, "perfect predictor instead of a model (predictive)");

  CommonOpts gen_opts;
  std::string gen_seeds = "1..5";
  auto* gen = app.add_subcommand("gen-dataset", "generate a training dataset from legacy runs");
  add_common(gen, gen_opts);
  gen->add_option("--seeds", gen_seeds, "seed list: 7 | 1,2,3 | 1..5 (default 1..5)");

  CommonOpts train_opts;
  std::string train_dataset;
  std::string train_kind = "rf";
  std::uint64_t train_seed = 1;
  std::uint64_t split_seed = 1;
  int opt_trees = -1, opt_depth = -1, opt_leaf = -1, opt_neighbors = -1;
  auto* train = app.add_subcommand("train", "train a next-bitrate classifier");
  add_common(train, train_opts);
  train->add_option("--dataset", train_dataset, "dataset CSV")->required()->check(CLI::ExistingFile);
  train->add_option("--model", train_kind, "rf | knn | lda | svm (default rf)");
  train->add_option("--seed", train_seed, "training seed (default 1)");
  train->add_option("--split-seed", split_seed, "train/test split seed (default 1)");
  train->add_option("--trees", opt_trees, "random forest size override");
  train->add_option("--max-depth", opt_depth, "tree depth cap override (0 = unbounded)");
  train->add_option("--min-leaf", opt_leaf, "min samples per leaf override");
  train->add_option("--neighbors", opt_neighbors, "knn neighbor count override");

  CommonOpts eval_opts;
  std::string eval_dataset;
  std::string eval_model;
  auto* eval = app.add_subcommand("evaluate", "evaluate a model on the held-out split");
  add_common(eval, eval_opts);
  eval->add_option("--dataset", eval_dataset, "dataset CSV")->required()->check(CLI::ExistingFile);
  eval->add_option("--model", eval_model, "trained model file")->required()->check(CLI::ExistingFile);

  CommonOpts cmp_opts;
  std::string cmp_seeds = "1..5";
  std::string cmp_model;
  bool cmp_oracle = false;
  auto* cmp = app.add_subcommand("compare", "run legacy, preemptive, predictive on shared seeds");
  add_common(cmp, cmp_opts);
  cmp->add_option("--seeds", cmp_seeds, "seed list (default 1..5)");
  cmp->add_option("--model", cmp_model, "trained model file for the predictive run")
      ->check(CLI::ExistingFile);
  cmp->add_flag("--oracle", cmp_oracle, "perfect predictor for the predictive run");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) {
      const ScenarioConfig cfg = cli::resolve_config(sim_opts.config);
      cli::cmd_simulate(cfg, strategy_from_string(sim_strategy), sim_seed,
                        out_or_default(sim_opts, "simulate"), sim_model, sim_oracle);
    } else if (gen->parsed()) {
      const ScenarioConfig cfg = cli::resolve_config(gen_opts.config);
      cli::cmd_gen_dataset(cfg, cli::parse_seeds(gen_seeds), out_or_default(gen_opts, "gen-dataset"));
    } else if (train->parsed()) {
      ScenarioConfig cfg = cli::resolve_config(train_opts.config);
      if (opt_trees >= 0) cfg.hyper.rf_trees = opt_trees;
      if (opt_depth >= 0) cfg.hyper.rf_max_depth = opt_depth;
      if (opt_leaf >= 0) cfg.hyper.rf_min_samples_leaf = opt_leaf;
      if (opt_neighbors >= 0) cfg.hyper.knn_neighbors = opt_neighbors;
      cli::cmd_train(cfg, train_dataset, model_kind_from_string(train_kind), train_seed,
                     split_seed, out_or_default(train_opts, "train"));
    } else if (eval->parsed()) {
      const ScenarioConfig cfg = cli::resolve_config(eval_opts.config);
      cli::cmd_evaluate(cfg, eval_dataset, eval_model, out_or_default(eval_opts, "evaluate"));
    } else if (cmp->parsed()) {
      const ScenarioConfig cfg = cli::resolve_config(cmp_opts.config);
      cli::cmd_compare(cfg, cli::parse_seeds(cmp_seeds), cmp_model, cmp_oracle,
                       out_or_default(cmp_opts, "compare"));
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
