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

// Reward-weight search: candidate grid, ranking-based pruning, per-candidate
// evaluation over a traffic-matrix sequence and mean-rank scoring.

#pragma once

#include <array>
#include <string>
#include <vector>

#include "json.hpp"
#include "xnet/evalkit.hpp"
#include "xnet/qrouter.hpp"
#include "xnet/xaikit.hpp"

namespace xnet {

/// Simplex points with components in multiples of `step`, ordered by bwd
/// descending, then delay descending. 1/step must be an integer.
std::vector<RewardWeights> WeightGrid(double step = 0.05);

/// Keeps candidates whose weights follow the ranking order of the three
/// metric features (non-strict); the equal-weight baseline is always kept
/// and appended when absent.
std::vector<RewardWeights> PruneByRanking(const std::vector<RewardWeights>& grid,
                                          const FeatureRanking& ranking);

/// One monitoring interval: the agent trains on `input` (the previous
/// interval's measured state), installs routes and the TM is applied.
struct IntervalResult {
  std::string tag;
  LinkMetrics input;
  QTables tables;
  LinkMetrics measured;  // equals `input` when extraction failed
  TmMetrics metrics;
};

/// Runs the TMs in order starting from an idle network. Training for TM i is
/// seeded with MixSeed(h.seed, i). With `warm_start` each interval starts
/// from the previous interval's tables.
std::vector<IntervalResult> RunIntervals(const RewardWeights& w,
                                         const Topology& topology,
                                         const std::vector<TrafficMatrix>& tms,
                                         const Hyperparams& h,
                                         bool warm_start = false);

/// Routes each TM with an agent trained on the previous interval's measured
/// state (idle before the first) and scores the result. Every candidate
/// sees the same training seeds.
EvalReport EvaluateWeights(const RewardWeights& w, const Topology& topology,
                           const std::vector<TrafficMatrix>& tms,
                           const Hyperparams& h, bool warm_start = false);

struct WeightCandidate {
  RewardWeights weights = RewardWeights::Equal();
  std::string provenance;  // grid | xai-pruned | baseline | manual
  EvalReport report;
};

struct RankedCandidate {
  WeightCandidate candidate;
  std::array<double, kNumMetrics> ranks{};  // 1 = best, ties averaged
  double score = 0.0;                       // mean of ranks
};

struct TuneResult {
  std::vector<RankedCandidate> ranking;  // best first
  EvalReport baseline;
  std::vector<RewardWeights> top;
  nlohmann::json fingerprint = nlohmann::json::object();
};

/// Ranks already-evaluated candidates by mean rank over the overall metric
/// means; ties go to the lexicographically smaller weights. Duplicated
/// weights are merged. The baseline must be among the candidates.
TuneResult ScoreCandidates(std::vector<WeightCandidate> candidates, int k);

/// Evaluates every candidate (plus the baseline when absent) and scores them.
TuneResult Search(const std::vector<WeightCandidate>& candidates,
                  const Topology& topology,
                  const std::vector<TrafficMatrix>& tms, const Hyperparams& h,
                  int k = 2, bool warm_start = false);

nlohmann::json ToJson(const TuneResult& result);

}  // namespace xnet
