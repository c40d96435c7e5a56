// Copyright 2026 The xnet Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Run configuration for xnetctl. The file is JSON; every key is optional and
// unknown keys are rejected. Relative paths resolve against the directory of
// the config file.
//
// Seed derivation: the global seed drives the synthetic traffic (unless
// traffic.seed is set), the agent (TM i trains with MixSeed(seed, i)), the
// train/test split, the forest bootstrap and the explanation samples
// (background: MixSeed(seed, 1), ranked rows: MixSeed(seed, 2), curve rows:
// MixSeed(seed, 3)).

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "xnet/netcore.hpp"
#include "xnet/qrouter.hpp"
#include "xnet/surrogate.hpp"

namespace xnetctl {

struct RunConfig {
  std::uint64_t seed = 1;
  std::filesystem::path out = "xnet_out";

  // topology
  std::string topology_source = "builtin";  // builtin | file
  std::filesystem::path topology_path;

  // traffic
  std::string traffic_source = "synthetic";  // synthetic | directory
  int traffic_n = 16;
  std::optional<std::uint64_t> traffic_seed;
  double peak_scale = 1.0;
  std::filesystem::path traffic_path;

  xnet::Hyperparams agent;
  bool warm_start = false;

  double test_frac = 0.2;

  double ridge_lambda = 1.0;
  xnet::ForestParams forest;
  xnet::BoostParams boosted;

  int background_rows = 256;
  int rank_rows = 2000;
  int grid_size = 20;
  int curve_rows = 500;

  double tuner_step = 0.05;
  int tuner_k = 2;
  bool tuner_prune = true;

  std::vector<xnet::RewardWeights> eval_weights = {
      xnet::RewardWeights::Equal(), xnet::RewardWeights(0.6, 0.3, 0.1),
      xnet::RewardWeights(0.65, 0.35, 0.0)};

  /// Agent hyperparameters with the global seed applied.
  xnet::Hyperparams AgentParams() const;
  xnet::ForestParams ForestParamsSeeded() const;
};

/// Defaults overlaid with the keys present in `j`. Throws
/// Error(kConfig) on unknown keys or wrongly typed values.
RunConfig ConfigFromJson(const nlohmann::json& j,
                         const std::filesystem::path& base_dir);
nlohmann::json ConfigToJson(const RunConfig& config);

/// Reads and parses a config file.
RunConfig LoadConfig(const std::filesystem::path& path);

/// Range checks and referenced-path existence. Throws Error(kConfig).
void ValidateConfig(const RunConfig& config);

/// "b,d,l" or "equal". Components must sum to 1 within 1e-3 and are
/// rescaled onto the simplex.
xnet::RewardWeights ParseWeights(const std::string& text);

xnet::Topology ResolveTopology(const RunConfig& config);
std::vector<xnet::TrafficMatrix> ResolveTraffic(const RunConfig& config,
                                                const xnet::Topology& topology);

}  // namespace xnetctl
