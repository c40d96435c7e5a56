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

#include "config.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "xnet/common.hpp"
#include "xnet/tuner.hpp"

namespace xnetctl {

using nlohmann::json;
using xnet::ErrorKind;
using xnet::Throw;

namespace {

void CheckKeys(const json& j, const std::string& section,
               const std::set<std::string>& allowed) {
  if (!j.is_object()) {
    Throw(ErrorKind::kConfig, "'" + section + "' must be an object");
  }
  for (const auto& [key, value] : j.items()) {
    if (!allowed.contains(key)) {
      Throw(ErrorKind::kConfig, "unknown key '" + section + "." + key + "'");
    }
  }
}

template <typename T>
void Read(const json& j, const std::string& key, const std::string& section,
          T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception&) {
    Throw(ErrorKind::kConfig, "bad value for '" + section + "." + key + "'");
  }
}

void ReadPath(const json& j, const std::string& key, const std::string& section,
              const std::filesystem::path& base, std::filesystem::path& out) {
  std::string text;
  if (!j.contains(key)) return;
  Read(j, key, section, text);
  std::filesystem::path p(text);
  out = p.is_absolute() || base.empty() ? p : base / p;
}

json WeightsToJson(const xnet::RewardWeights& w) {
  return json::array({w.bwd(), w.delay(), w.pkloss()});
}

xnet::RewardWeights WeightsFromJson(const json& j) {
  if (j.is_string()) return ParseWeights(j.get<std::string>());
  if (!j.is_array() || j.size() != 3 || !j[0].is_number() ||
      !j[1].is_number() || !j[2].is_number()) {
    Throw(ErrorKind::kConfig, "weights must be [bwd, delay, pkloss] or \"equal\"");
  }
  const double b = j[0].get<double>(), d = j[1].get<double>(),
               l = j[2].get<double>();
  return ParseWeights(xnet::FormatDouble(b) + "," + xnet::FormatDouble(d) +
                      "," + xnet::FormatDouble(l));
}

}  // namespace

xnet::Hyperparams RunConfig::AgentParams() const {
  xnet::Hyperparams h = agent;
  h.seed = seed;
  return h;
}

xnet::ForestParams RunConfig::ForestParamsSeeded() const {
  xnet::ForestParams p = forest;
  p.seed = seed;
  return p;
}

xnet::RewardWeights ParseWeights(const std::string& text) {
  const std::string t = xnet::Trim(text);
  if (t == "equal" || t == "baseline") return xnet::RewardWeights::Equal();
  const auto parts = xnet::SplitCsvLine(t);
  if (parts.size() != 3) {
    Throw(ErrorKind::kConfig, "weights '" + t + "' must have three components");
  }
  double v[3];
  for (int i = 0; i < 3; ++i) {
    try {
      v[i] = xnet::ParseDouble(parts[i], "weights");
    } catch (const xnet::Error& e) {
      Throw(ErrorKind::kConfig, e.what());
    }
    if (!(v[i] >= 0.0)) Throw(ErrorKind::kConfig, "weights must be non-negative");
  }
  if (std::abs(v[0] + v[1] + v[2] - 1.0) > 1e-3) {
    Throw(ErrorKind::kConfig, "weights '" + t + "' must sum to 1");
  }
  if (std::abs(v[0] + v[1] + v[2] - 1.0) <= xnet::RewardWeights::kSumTolerance) {
    return xnet::RewardWeights(v[0], v[1], v[2]);
  }
  return xnet::RewardWeights::Normalized(v[0], v[1], v[2]);
}

RunConfig ConfigFromJson(const json& j, const std::filesystem::path& base) {
  RunConfig c;
  CheckKeys(j, "config",
            {"seed", "out", "topology", "traffic", "agent", "dataset",
             "surrogate", "explain", "tuner", "eval"});
  Read(j, "seed", "config", c.seed);
  ReadPath(j, "out", "config", base, c.out);

  if (j.contains("topology")) {
    const json& t = j["topology"];
    CheckKeys(t, "topology", {"source", "path"});
    Read(t, "source", "topology", c.topology_source);
    ReadPath(t, "path", "topology", base, c.topology_path);
  }
  if (j.contains("traffic")) {
    const json& t = j["traffic"];
    CheckKeys(t, "traffic", {"source", "n", "seed", "peak_scale", "path"});
    Read(t, "source", "traffic", c.traffic_source);
    Read(t, "n", "traffic", c.traffic_n);
    if (t.contains("seed") && !t["seed"].is_null()) {
      std::uint64_t s = 0;
      Read(t, "seed", "traffic", s);
      c.traffic_seed = s;
    }
    Read(t, "peak_scale", "traffic", c.peak_scale);
    ReadPath(t, "path", "traffic", base, c.traffic_path);
  }
  if (j.contains("agent")) {
    const json& a = j["agent"];
    CheckKeys(a, "agent",
              {"alpha", "gamma", "epsilon", "episodes_per_pair", "max_steps",
               "cost_floor", "warm_start"});
    Read(a, "alpha", "agent", c.agent.alpha);
    Read(a, "gamma", "agent", c.agent.gamma);
    Read(a, "epsilon", "agent", c.agent.epsilon);
    Read(a, "episodes_per_pair", "agent", c.agent.episodes_per_pair);
    Read(a, "max_steps", "agent", c.agent.max_steps);
    Read(a, "cost_floor", "agent", c.agent.cost_floor);
    Read(a, "warm_start", "agent", c.warm_start);
  }
  if (j.contains("dataset")) {
    CheckKeys(j["dataset"], "dataset", {"test_frac"});
    Read(j["dataset"], "test_frac", "dataset", c.test_frac);
  }
  if (j.contains("surrogate")) {
    const json& s = j["surrogate"];
    CheckKeys(s, "surrogate", {"ridge_lambda", "forest", "boosted"});
    Read(s, "ridge_lambda", "surrogate", c.ridge_lambda);
    if (s.contains("forest")) {
      const json& f = s["forest"];
      CheckKeys(f, "surrogate.forest",
                {"n_trees", "max_depth", "min_leaf", "feature_frac",
                 "bootstrap"});
      Read(f, "n_trees", "surrogate.forest", c.forest.n_trees);
      Read(f, "max_depth", "surrogate.forest", c.forest.max_depth);
      Read(f, "min_leaf", "surrogate.forest", c.forest.min_leaf);
      Read(f, "feature_frac", "surrogate.forest", c.forest.feature_frac);
      Read(f, "bootstrap", "surrogate.forest", c.forest.bootstrap);
    }
    if (s.contains("boosted")) {
      const json& b = s["boosted"];
      CheckKeys(b, "surrogate.boosted",
                {"n_rounds", "eta", "max_depth", "lambda", "min_leaf"});
      Read(b, "n_rounds", "surrogate.boosted", c.boosted.n_rounds);
      Read(b, "eta", "surrogate.boosted", c.boosted.eta);
      Read(b, "max_depth", "surrogate.boosted", c.boosted.max_depth);
      Read(b, "lambda", "surrogate.boosted", c.boosted.lambda);
      Read(b, "min_leaf", "surrogate.boosted", c.boosted.min_leaf);
    }
  }
  if (j.contains("explain")) {
    const json& e = j["explain"];
    CheckKeys(e, "explain",
              {"background_rows", "rank_rows", "grid_size", "curve_rows"});
    Read(e, "background_rows", "explain", c.background_rows);
    Read(e, "rank_rows", "explain", c.rank_rows);
    Read(e, "grid_size", "explain", c.grid_size);
    Read(e, "curve_rows", "explain", c.curve_rows);
  }
  if (j.contains("tuner")) {
    const json& t = j["tuner"];
    CheckKeys(t, "tuner", {"step", "k", "prune"});
    Read(t, "step", "tuner", c.tuner_step);
    Read(t, "k", "tuner", c.tuner_k);
    Read(t, "prune", "tuner", c.tuner_prune);
  }
  if (j.contains("eval")) {
    const json& e = j["eval"];
    CheckKeys(e, "eval", {"weights"});
    if (e.contains("weights")) {
      if (!e["weights"].is_array() || e["weights"].empty()) {
        Throw(ErrorKind::kConfig, "'eval.weights' must be a non-empty list");
      }
      c.eval_weights.clear();
      for (const json& w : e["weights"]) c.eval_weights.push_back(WeightsFromJson(w));
    }
  }
  return c;
}

json ConfigToJson(const RunConfig& c) {
  json j;
  j["seed"] = c.seed;
  j["out"] = c.out.string();
  j["topology"] = {{"source", c.topology_source}};
  if (c.topology_source == "file") j["topology"]["path"] = c.topology_path.string();
  j["traffic"] = {{"source", c.traffic_source}};
  if (c.traffic_source == "synthetic") {
    j["traffic"]["n"] = c.traffic_n;
    j["traffic"]["peak_scale"] = c.peak_scale;
    j["traffic"]["seed"] = c.traffic_seed ? json(*c.traffic_seed) : json(nullptr);
  } else {
    j["traffic"]["path"] = c.traffic_path.string();
  }
  j["agent"] = {{"alpha", c.agent.alpha},
                {"gamma", c.agent.gamma},
                {"epsilon", c.agent.epsilon},
                {"episodes_per_pair", c.agent.episodes_per_pair},
                {"max_steps", c.agent.max_steps},
                {"cost_floor", c.agent.cost_floor},
                {"warm_start", c.warm_start}};
  j["dataset"] = {{"test_frac", c.test_frac}};
  j["surrogate"] = {
      {"ridge_lambda", c.ridge_lambda},
      {"forest",
       {{"n_trees", c.forest.n_trees},
        {"max_depth", c.forest.max_depth},
        {"min_leaf", c.forest.min_leaf},
        {"feature_frac", c.forest.feature_frac},
        {"bootstrap", c.forest.bootstrap}}},
      {"boosted",
       {{"n_rounds", c.boosted.n_rounds},
        {"eta", c.boosted.eta},
        {"max_depth", c.boosted.max_depth},
        {"lambda", c.boosted.lambda},
        {"min_leaf", c.boosted.min_leaf}}}};
  j["explain"] = {{"background_rows", c.background_rows},
                  {"rank_rows", c.rank_rows},
                  {"grid_size", c.grid_size},
                  {"curve_rows", c.curve_rows}};
  j["tuner"] = {{"step", c.tuner_step}, {"k", c.tuner_k}, {"prune", c.tuner_prune}};
  json weights = json::array();
  for (const auto& w : c.eval_weights) weights.push_back(WeightsToJson(w));
  j["eval"] = {{"weights", weights}};
  return j;
}

RunConfig LoadConfig(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) {
    Throw(ErrorKind::kConfig, "config file not found: " + path.string());
  }
  json j;
  try {
    j = json::parse(xnet::ReadFile(path));
  } catch (const json::exception& e) {
    Throw(ErrorKind::kConfig, path.string() + ": " + e.what());
  }
  return ConfigFromJson(j, path.parent_path());
}

void ValidateConfig(const RunConfig& c) {
  auto fail = [](const std::string& msg) { Throw(ErrorKind::kConfig, msg); };
  if (c.topology_source == "file") {
    if (c.topology_path.empty()) fail("topology.path is required for source 'file'");
    if (!std::filesystem::is_regular_file(c.topology_path)) {
      fail("topology file not found: " + c.topology_path.string());
    }
  } else if (c.topology_source != "builtin") {
    fail("topology.source must be 'builtin' or 'file'");
  }
  if (c.traffic_source == "directory") {
    if (!std::filesystem::is_directory(c.traffic_path)) {
      fail("traffic directory not found: " + c.traffic_path.string());
    }
  } else if (c.traffic_source == "synthetic") {
    if (c.traffic_n < 1) fail("traffic.n must be >= 1");
    if (!(c.peak_scale > 0.0 && c.peak_scale <= 1.0)) {
      fail("traffic.peak_scale must be in (0, 1]");
    }
  } else {
    fail("traffic.source must be 'synthetic' or 'directory'");
  }
  try {
    c.AgentParams().Validate();
  } catch (const xnet::Error& e) {
    fail(std::string("agent: ") + e.what());
  }
  if (!(c.test_frac >= 0.0 && c.test_frac < 1.0)) {
    fail("dataset.test_frac must be in [0, 1)");
  }
  if (!(c.ridge_lambda >= 0.0)) fail("surrogate.ridge_lambda must be >= 0");
  if (c.forest.n_trees < 1) fail("surrogate.forest.n_trees must be >= 1");
  if (c.forest.min_leaf < 1) fail("surrogate.forest.min_leaf must be >= 1");
  if (c.boosted.n_rounds < 0) fail("surrogate.boosted.n_rounds must be >= 0");
  if (!(c.boosted.eta > 0.0)) fail("surrogate.boosted.eta must be > 0");
  if (!(c.boosted.lambda >= 0.0)) fail("surrogate.boosted.lambda must be >= 0");
  if (c.boosted.min_leaf < 1) fail("surrogate.boosted.min_leaf must be >= 1");
  if (c.background_rows < 1) fail("explain.background_rows must be >= 1");
  if (c.rank_rows < 1) fail("explain.rank_rows must be >= 1");
  if (c.grid_size < 1) fail("explain.grid_size must be >= 1");
  if (c.curve_rows < 1) fail("explain.curve_rows must be >= 1");
  if (c.tuner_k < 1) fail("tuner.k must be >= 1");
  try {
    xnet::WeightGrid(c.tuner_step);
  } catch (const xnet::Error& e) {
    fail(std::string("tuner.step: ") + e.what());
  }
  if (c.out.empty()) fail("out must not be empty");
}

xnet::Topology ResolveTopology(const RunConfig& c) {
  if (c.topology_source == "builtin") return xnet::BuiltinGeant();
  return xnet::LoadTopology(c.topology_path);
}

std::vector<xnet::TrafficMatrix> ResolveTraffic(const RunConfig& c,
                                                const xnet::Topology& topology) {
  if (c.traffic_source == "synthetic") {
    return xnet::SynthDiurnal(topology, c.traffic_n, c.traffic_seed.value_or(c.seed),
                              c.peak_scale);
  }
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(c.traffic_path)) {
    const std::string name = entry.path().filename().string();
    if (entry.is_regular_file() && name.starts_with("tm_") &&
        name.ends_with(".csv")) {
      files.push_back(entry.path());
    }
  }
  if (files.empty()) {
    Throw(ErrorKind::kConfig,
          "no tm_*.csv files in " + c.traffic_path.string());
  }
  std::sort(files.begin(), files.end());
  std::vector<xnet::TrafficMatrix> tms;
  for (const auto& f : files) tms.push_back(xnet::LoadTrafficMatrix(topology, f));
  return tms;
}

}  // namespace xnetctl
