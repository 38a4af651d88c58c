// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "edgesim/scenario.hpp"

namespace edgesim::cli {

/// Loads --config when given, otherwise the built-in default profile.
ScenarioConfig resolve_config(const std::string& config_path);

/// Accepts "7", "1,2,3", and "1..5" (inclusive range).
std::vector<std::uint64_t> parse_seeds(const std::string& spec);

/// out/<command>-<UTC timestamp>; contents stay reproducible, only the
/// default directory name carries the clock.
std::string default_out_dir(const std::string& command);

void cmd_simulate(const ScenarioConfig& cfg, Strategy strategy, std::uint64_t seed,
                  const std::string& out_dir, const std::string& model_path, bool oracle);

void cmd_gen_dataset(const ScenarioConfig& cfg, const std::vector<std::uint64_t>& seeds,
                     const std::string& out_dir);

void cmd_train(const ScenarioConfig& cfg, const std::string& dataset_path, ModelKind kind,
               std::uint64_t train_seed, std::uint64_t split_seed, const std::string& out_dir);

void cmd_evaluate(const ScenarioConfig& cfg, const std::string& dataset_path,
                  const std::string& model_path, const std::string& out_dir);

void cmd_compare(const ScenarioConfig& cfg, const std::vector<std::uint64_t>& seeds,
                 const std::string& model_path, bool oracle, const std::string& out_dir);

}  // namespace edgesim::cli
