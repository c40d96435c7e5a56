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

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "xnet/tuner.hpp"

namespace xnet {
namespace {

FeatureRanking MakeRanking(std::vector<std::string> order) {
  FeatureRanking r;
  double score = 10.0;
  for (const auto& name : order) r.scores.push_back({name, 0, score--});
  return r;
}

EvalReport Report(const std::array<double, 4>& v) {
  EvalReport r;
  TmMetrics t;
  t.tag = "t";
  t.values = v;
  r.per_tm.push_back(t);
  return r;
}

TEST(WeightGrid, SizeOrderAndSimplex) {
  const auto g = WeightGrid(0.05);
  EXPECT_EQ(g.size(), 231u);  // C(22, 2)
  EXPECT_EQ(g.front(), RewardWeights(1, 0, 0));
  EXPECT_EQ(g[1], RewardWeights(0.95, 0.05, 0));
  EXPECT_EQ(g.back(), RewardWeights(0, 0, 1));
  for (std::size_t i = 1; i < g.size(); ++i) {
    const bool ordered = g[i - 1].bwd() > g[i].bwd() ||
                         (g[i - 1].bwd() == g[i].bwd() && g[i - 1].delay() > g[i].delay());
    EXPECT_TRUE(ordered);
  }
  EXPECT_EQ(WeightGrid(0.5).size(), 6u);
  EXPECT_THROW(WeightGrid(0.3), Error);
  EXPECT_THROW(WeightGrid(0.0), Error);
}

TEST(Prune, FollowsRankingOrderAndKeepsBaseline) {
  const auto grid = WeightGrid(0.05);
  const auto ranking =
      MakeRanking({"bwd_hat", "dst_enc", "src_enc", "delay_hat", "pkloss_hat"});
  const auto kept = PruneByRanking(grid, ranking);
  EXPECT_NE(std::find(kept.begin(), kept.end(), RewardWeights(0.6, 0.3, 0.1)), kept.end());
  EXPECT_NE(std::find(kept.begin(), kept.end(), RewardWeights(0.65, 0.35, 0)), kept.end());
  EXPECT_NE(std::find(kept.begin(), kept.end(), RewardWeights::Equal()), kept.end());
  for (const auto& w : kept) {
    if (w == RewardWeights::Equal()) continue;
    EXPECT_GE(w.bwd(), w.delay());
    EXPECT_GE(w.delay(), w.pkloss());
  }
  // Exhaustive check: every ordered grid point survives.
  std::size_t ordered = 0;
  for (const auto& w : grid) ordered += w.bwd() >= w.delay() && w.delay() >= w.pkloss();
  EXPECT_EQ(kept.size(), ordered + 1);  // + the appended baseline
  const auto reversed = PruneByRanking(grid, MakeRanking({"pkloss_hat", "delay_hat", "bwd_hat"}));
  for (const auto& w : reversed) EXPECT_GE(w.pkloss(), w.delay());
  EXPECT_THROW(PruneByRanking(grid, MakeRanking({"bwd_hat"})), Error);
}

TEST(Score, AveragedRanksByHand) {
  std::vector<WeightCandidate> c = {
      {RewardWeights::Equal(), "baseline", Report({1.2, 50, 30, 0.2})},
      {RewardWeights(0.6, 0.3, 0.1), "xai-pruned", Report({1.1, 50, 28, 0.1})},
      {RewardWeights(1, 0, 0), "grid", Report({1.3, 40, 30, 0.3})}};
  const TuneResult r = ScoreCandidates(c, 2);
  // stretch ranks 2,1,3; delay 2.5,2.5,1; throughput 1.5,3,1.5; loss 2,1,3.
  ASSERT_EQ(r.ranking.size(), 3u);
  EXPECT_EQ(r.ranking[0].candidate.weights, RewardWeights(0.6, 0.3, 0.1));
  EXPECT_DOUBLE_EQ(r.ranking[0].score, (1 + 2.5 + 3 + 1) / 4.0);
  EXPECT_EQ(r.ranking[1].candidate.weights, RewardWeights::Equal());
  EXPECT_DOUBLE_EQ(r.ranking[1].score, (2 + 2.5 + 1.5 + 2) / 4.0);
  EXPECT_DOUBLE_EQ(r.ranking[2].score, (3 + 1 + 1.5 + 3) / 4.0);
  EXPECT_EQ(r.top.size(), 2u);
  EXPECT_EQ(r.baseline, c[0].report);
  c.erase(c.begin());
  EXPECT_THROW(ScoreCandidates(c, 2), Error);
}

TEST(Score, IndependentOfInputOrder) {
  std::vector<WeightCandidate> c;
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (const auto& w : WeightGrid(0.25)) {
    c.push_back({w, "grid", Report({1 + u(rng), 10 * u(rng), 5 * u(rng), u(rng)})});
  }
  c.push_back({RewardWeights::Equal(), "baseline", Report({1.5, 5, 2, 0.5})});
  c.push_back(c[3]);  // duplicate weights collapse
  const nlohmann::json ref = ToJson(ScoreCandidates(c, 3));
  for (int i = 0; i < 5; ++i) {
    std::shuffle(c.begin(), c.end(), rng);
    EXPECT_EQ(ToJson(ScoreCandidates(c, 3)), ref);
  }
  EXPECT_EQ(ref["ranking"].size(), 16u);
}

TEST(Search, AddsBaselineAndFingerprints) {
  const Topology t = Topology::Create({{"A", "B", 10, 1}, {"B", "C", 10, 2}, {"A", "C", 5, 4}});
  const auto tms = SynthDiurnal(t, 3, 1, 1.0);
  Hyperparams h;
  h.episodes_per_pair = 30;
  h.seed = 5;
  const TuneResult r = Search({{RewardWeights(1, 0, 0), "manual", {}}}, t, tms, h, 1);
  EXPECT_EQ(r.ranking.size(), 2u);
  EXPECT_EQ(r.baseline.per_tm.size(), 3u);
  EXPECT_EQ(r.fingerprint["topology_hash"], TopologyHash(t));
  EXPECT_EQ(r.fingerprint["tm_tags"].size(), 3u);
  EXPECT_EQ(r.top.size(), 1u);
  EXPECT_EQ(ToJson(r), ToJson(Search({{RewardWeights(1, 0, 0), "manual", {}}}, t, tms, h, 1)));
  EXPECT_THROW(Search({}, t, {}, h, 1), Error);
}

TEST(RunIntervals, ChainsMeasuredState) {
  const Topology t = Topology::Create({{"A", "B", 10, 1}, {"B", "C", 10, 2}, {"A", "C", 5, 4}});
  const auto tms = SynthDiurnal(t, 4, 2, 1.0);
  Hyperparams h;
  h.episodes_per_pair = 40;
  const auto runs = RunIntervals(RewardWeights::Equal(), t, tms, h);
  ASSERT_EQ(runs.size(), 4u);
  EXPECT_TRUE((runs[0].input.load == 0.0).all());
  for (std::size_t i = 1; i < runs.size(); ++i) {
    EXPECT_TRUE((runs[i].input.load == runs[i - 1].measured.load).all());
    EXPECT_EQ(runs[i].tag, tms[i].tag);
  }
  const auto warm = RunIntervals(RewardWeights::Equal(), t, tms, h, true);
  EXPECT_EQ(warm[0].tables, runs[0].tables);
  const EvalReport report = EvaluateWeights(RewardWeights::Equal(), t, tms, h);
  for (std::size_t i = 0; i < runs.size(); ++i) EXPECT_EQ(report.per_tm[i], runs[i].metrics);
}

}  // namespace
}  // namespace xnet
