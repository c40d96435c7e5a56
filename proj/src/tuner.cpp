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

#include "xnet/tuner.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace xnet {
namespace {

nlohmann::json WeightsJson(const RewardWeights& w) {
  return nlohmann::json::array({w.bwd(), w.delay(), w.pkloss()});
}

nlohmann::json HyperparamsJson(const Hyperparams& h) {
  return {{"alpha", h.alpha},
          {"gamma", h.gamma},
          {"epsilon", h.epsilon},
          {"episodes_per_pair", h.episodes_per_pair},
          {"max_steps", h.max_steps},
          {"cost_floor", h.cost_floor},
          {"seed", h.seed}};
}

// 1-based ranks with ties averaged.
std::vector<double> AverageRanks(const std::vector<double>& values,
                                 bool higher_better) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return higher_better ? values[a] > values[b] : values[a] < values[b];
  });
  std::vector<double> ranks(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = avg;
    i = j + 1;
  }
  return ranks;
}

int ProvenancePriority(const std::string& p) { return p == "baseline" ? 0 : 1; }

}  // namespace

std::vector<RewardWeights> WeightGrid(double step) {
  if (!(step > 0.0) || step > 1.0) {
    Throw(ErrorKind::kValidation, "weight_grid: step must be in (0, 1]");
  }
  const double inv = 1.0 / step;
  const long n = std::lround(inv);
  if (std::abs(inv - static_cast<double>(n)) > 1e-9) {
    Throw(ErrorKind::kValidation, "weight_grid: 1/step must be an integer");
  }
  std::vector<RewardWeights> grid;
  const double dn = static_cast<double>(n);
  for (long i = n; i >= 0; --i) {
    for (long j = n - i; j >= 0; --j) {
      const long l = n - i - j;
      grid.emplace_back(i / dn, j / dn, l / dn);
    }
  }
  return grid;
}

std::vector<RewardWeights> PruneByRanking(const std::vector<RewardWeights>& grid,
                                          const FeatureRanking& ranking) {
  std::vector<int> order;  // MetricColumn indices, most important first
  for (const FeatureScore& s : ranking.scores) {
    for (int c = 0; c < 3; ++c) {
      if (s.name == kMetricNames[c]) order.push_back(c);
    }
  }
  if (order.size() != 3) {
    Throw(ErrorKind::kValidation,
          "prune_by_ranking: ranking must contain bwd_hat, delay_hat and "
          "pkloss_hat");
  }
  const RewardWeights baseline = RewardWeights::Equal();
  std::vector<RewardWeights> kept;
  bool has_baseline = false;
  for (const RewardWeights& w : grid) {
    const Eigen::Vector3d& v = w.vector();
    if (w == baseline) {
      has_baseline = true;
      kept.push_back(w);
    } else if (v[order[0]] >= v[order[1]] && v[order[1]] >= v[order[2]]) {
      kept.push_back(w);
    }
  }
  if (!has_baseline) kept.push_back(baseline);
  return kept;
}

std::vector<IntervalResult> RunIntervals(const RewardWeights& w,
                                         const Topology& topology,
                                         const std::vector<TrafficMatrix>& tms,
                                         const Hyperparams& h,
                                         bool warm_start) {
  h.Validate();
  std::vector<IntervalResult> out;
  out.reserve(tms.size());
  LinkMetrics state = IdleMetrics(topology);
  for (std::size_t i = 0; i < tms.size(); ++i) {
    ValidateTrafficMatrix(topology, tms[i]);
    Hyperparams hi = h;
    hi.seed = MixSeed(h.seed, i);
    IntervalResult r;
    r.tag = tms[i].tag;
    r.input = state;
    const QTables* warm = warm_start && i > 0 ? &out.back().tables : nullptr;
    r.tables = Train(topology, NormalizeMetrics(state), w, hi, warm);
    try {
      const RouteSet routes = ExtractAllPaths(topology, r.tables);
      r.measured = ApplyRoutes(topology, routes, tms[i]);
      r.metrics = EvaluateTm(tms[i].tag, topology, routes, r.measured);
      state = r.measured;
    } catch (const ExtractionFailure&) {
      r.measured = state;
      r.metrics = WorstCaseTm(tms[i].tag, topology);
    }
    out.push_back(std::move(r));
  }
  return out;
}

EvalReport EvaluateWeights(const RewardWeights& w, const Topology& topology,
                           const std::vector<TrafficMatrix>& tms,
                           const Hyperparams& h, bool warm_start) {
  EvalReport report;
  report.name = w.ToString();
  for (IntervalResult& r : RunIntervals(w, topology, tms, h, warm_start)) {
    report.per_tm.push_back(std::move(r.metrics));
  }
  report.metadata["weights"] = WeightsJson(w);
  report.metadata["hyperparameters"] = HyperparamsJson(h);
  report.metadata["warm_start"] = warm_start;
  report.metadata["topology_hash"] = TopologyHash(topology);
  return report;
}

TuneResult ScoreCandidates(std::vector<WeightCandidate> candidates, int k) {
  if (candidates.empty()) Throw(ErrorKind::kValidation, "search: no candidates");
  if (k < 1) Throw(ErrorKind::kValidation, "search: k must be >= 1");
  // Canonical order makes the result independent of the input order.
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const WeightCandidate& a, const WeightCandidate& b) {
                     if (!(a.weights == b.weights)) return a.weights < b.weights;
                     const int pa = ProvenancePriority(a.provenance);
                     const int pb = ProvenancePriority(b.provenance);
                     if (pa != pb) return pa < pb;
                     return a.provenance < b.provenance;
                   });
  candidates.erase(std::unique(candidates.begin(), candidates.end(),
                               [](const WeightCandidate& a,
                                  const WeightCandidate& b) {
                                 return a.weights == b.weights;
                               }),
                   candidates.end());

  TuneResult result;
  const RewardWeights baseline = RewardWeights::Equal();
  bool found = false;
  for (const WeightCandidate& c : candidates) {
    if (c.weights == baseline) {
      result.baseline = c.report;
      found = true;
    }
  }
  if (!found) Throw(ErrorKind::kValidation, "search: baseline not evaluated");

  const std::size_t n = candidates.size();
  std::vector<std::array<double, kNumMetrics>> overall(n);
  for (std::size_t i = 0; i < n; ++i) overall[i] = candidates[i].report.Overall();
  std::vector<RankedCandidate> ranked(n);
  for (std::size_t i = 0; i < n; ++i) ranked[i].candidate = candidates[i];
  for (int m = 0; m < kNumMetrics; ++m) {
    std::vector<double> values(n);
    for (std::size_t i = 0; i < n; ++i) values[i] = overall[i][m];
    const auto r = AverageRanks(values, HigherIsBetter(static_cast<Metric>(m)));
    for (std::size_t i = 0; i < n; ++i) ranked[i].ranks[m] = r[i];
  }
  for (RankedCandidate& rc : ranked) {
    rc.score = std::accumulate(rc.ranks.begin(), rc.ranks.end(), 0.0) /
               kNumMetrics;
  }
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const RankedCandidate& a, const RankedCandidate& b) {
                     if (a.score != b.score) return a.score < b.score;
                     return a.candidate.weights < b.candidate.weights;
                   });
  result.ranking = std::move(ranked);
  for (std::size_t i = 0; i < result.ranking.size() && i < static_cast<std::size_t>(k);
       ++i) {
    result.top.push_back(result.ranking[i].candidate.weights);
  }
  return result;
}

TuneResult Search(const std::vector<WeightCandidate>& candidates,
                  const Topology& topology,
                  const std::vector<TrafficMatrix>& tms, const Hyperparams& h,
                  int k, bool warm_start) {
  if (tms.empty()) Throw(ErrorKind::kValidation, "search: no traffic matrices");
  std::vector<WeightCandidate> all = candidates;
  const RewardWeights baseline = RewardWeights::Equal();
  if (std::none_of(all.begin(), all.end(), [&](const WeightCandidate& c) {
        return c.weights == baseline;
      })) {
    all.push_back({baseline, "baseline", {}});
  }
  for (WeightCandidate& c : all) {
    c.report = EvaluateWeights(c.weights, topology, tms, h, warm_start);
    c.report.metadata["provenance"] = c.provenance;
  }
  TuneResult result = ScoreCandidates(std::move(all), k);
  std::vector<std::string> tags;
  for (const TrafficMatrix& tm : tms) tags.push_back(tm.tag);
  result.fingerprint = {{"topology_hash", TopologyHash(topology)},
                        {"hyperparameters", HyperparamsJson(h)},
                        {"seed", h.seed},
                        {"tm_tags", tags},
                        {"warm_start", warm_start},
                        {"k", k}};
  return result;
}

nlohmann::json ToJson(const TuneResult& result) {
  nlohmann::json j;
  j["schema_version"] = kReportSchemaVersion;
  j["fingerprint"] = result.fingerprint;
  j["baseline"] = ToJson(result.baseline);
  nlohmann::json ranking = nlohmann::json::array();
  for (const RankedCandidate& rc : result.ranking) {
    nlohmann::json c;
    c["weights"] = WeightsJson(rc.candidate.weights);
    c["provenance"] = rc.candidate.provenance;
    c["score"] = rc.score;
    for (int m = 0; m < kNumMetrics; ++m) {
      c["ranks"][std::string(kMetricColumns[m])] = rc.ranks[m];
    }
    c["report"] = ToJson(rc.candidate.report);
    ranking.push_back(std::move(c));
  }
  j["ranking"] = std::move(ranking);
  nlohmann::json top = nlohmann::json::array();
  for (const RewardWeights& w : result.top) top.push_back(WeightsJson(w));
  j["top"] = std::move(top);
  return j;
}

}  // namespace xnet
