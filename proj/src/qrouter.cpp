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

#include "xnet/qrouter.hpp"

#include <cmath>
#include <limits>

namespace xnet {

RewardWeights::RewardWeights(double bwd, double delay, double pkloss)
    : w_(bwd, delay, pkloss) {
  if (!w_.allFinite() || (w_.array() < 0.0).any() ||
      std::abs(w_.sum() - 1.0) > kSumTolerance) {
    Throw(ErrorKind::kValidation,
          "reward weights must be non-negative and sum to 1, got " +
              ToString());
  }
}

RewardWeights RewardWeights::Normalized(double bwd, double delay,
                                        double pkloss) {
  const double sum = bwd + delay + pkloss;
  if (!(sum > 0.0) || bwd < 0.0 || delay < 0.0 || pkloss < 0.0) {
    Throw(ErrorKind::kValidation, "reward weights need a positive sum");
  }
  return {bwd / sum, delay / sum, pkloss / sum};
}

std::string RewardWeights::ToString() const {
  return "(" + FormatDouble(w_[0]) + "," + FormatDouble(w_[1]) + "," +
         FormatDouble(w_[2]) + ")";
}

bool RewardWeights::operator<(const RewardWeights& o) const {
  for (int i = 0; i < 3; ++i) {
    if (w_[i] != o.w_[i]) return w_[i] < o.w_[i];
  }
  return false;
}

void Hyperparams::Validate() const {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    Throw(ErrorKind::kValidation, "alpha must be in (0,1]");
  }
  if (!(gamma >= 0.0 && gamma <= 1.0)) {
    Throw(ErrorKind::kValidation, "gamma must be in [0,1]");
  }
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
    Throw(ErrorKind::kValidation, "epsilon must be in [0,1]");
  }
  if (episodes_per_pair < 1) {
    Throw(ErrorKind::kValidation, "episodes_per_pair must be >= 1");
  }
  if (max_steps < 0) Throw(ErrorKind::kValidation, "max_steps must be >= 0");
  if (!(cost_floor >= 0.0 && cost_floor < 1.0)) {
    Throw(ErrorKind::kValidation, "cost_floor must be in [0,1)");
  }
}

namespace {

double MinOut(const Topology& topology, const Eigen::VectorXd& q,
              NodeIndex node) {
  double best = std::numeric_limits<double>::infinity();
  for (ArcIndex a : topology.out_arcs(node)) best = std::min(best, q[a]);
  return best;
}

// First arc with the smallest value; out_arcs order makes ties lexicographic.
ArcIndex Greedy(const Topology& topology, const Eigen::VectorXd& q,
                NodeIndex node) {
  const auto& out = topology.out_arcs(node);
  ArcIndex best = out.front();
  for (ArcIndex a : out) {
    if (q[a] < q[best]) best = a;
  }
  return best;
}

void TrainDestination(const Topology& topology, const Eigen::VectorXd& costs,
                      const Hyperparams& h, NodeIndex dst, Eigen::VectorXd& q) {
  Rng rng(MixSeed(h.seed ^ static_cast<std::uint64_t>(dst), 0));
  const int episodes = h.episodes_per_pair;
  const int step_limit = h.StepLimit(topology.num_nodes());
  for (int ep = 0; ep < episodes; ++ep) {
    // Linear decay reaching exactly zero on the final episode.
    const double eps =
        episodes > 1 ? h.epsilon * static_cast<double>(episodes - 1 - ep) /
                           static_cast<double>(episodes - 1)
                     : h.epsilon;
    for (NodeIndex src = 0; src < topology.num_nodes(); ++src) {
      if (src == dst) continue;
      NodeIndex cur = src;
      for (int step = 0; step < step_limit && cur != dst; ++step) {
        const auto& out = topology.out_arcs(cur);
        ArcIndex a;
        if (rng.Uniform() < eps) {
          a = out[rng.Index(out.size())];
        } else {
          a = Greedy(topology, q, cur);
        }
        const NodeIndex next = topology.arcs()[a].dst;
        const double min_next = next == dst ? 0.0 : MinOut(topology, q, next);
        q[a] = QUpdate(q[a], costs[a], min_next, h);
        cur = next;
      }
    }
  }
}

}  // namespace

QTables TrainOnCosts(const Topology& topology, const Eigen::VectorXd& costs,
                     const Hyperparams& h, const QTables* warm_start) {
  h.Validate();
  if (costs.size() != topology.num_arcs()) {
    Throw(ErrorKind::kValidation, "cost vector does not cover every link");
  }
  const int n = topology.num_nodes();
  QTables tables;
  if (warm_start != nullptr) {
    if (static_cast<int>(warm_start->values.size()) != n) {
      Throw(ErrorKind::kValidation, "warm-start tables do not match topology");
    }
    tables = *warm_start;
  } else {
    tables.values.assign(n, Eigen::VectorXd::Zero(topology.num_arcs()));
  }
  ParallelFor(static_cast<std::size_t>(n), [&](std::size_t d) {
    TrainDestination(topology, costs, h, static_cast<NodeIndex>(d),
                     tables.values[d]);
  });
  return tables;
}

QTables Train(const Topology& topology, const NormalizedMetrics& metrics,
              const RewardWeights& w, const Hyperparams& h,
              const QTables* warm_start) {
  if (metrics.rows() != topology.num_arcs()) {
    Throw(ErrorKind::kValidation, "normalized metrics do not cover every link");
  }
  const Eigen::VectorXd costs =
      (h.cost_floor + (1.0 - h.cost_floor) * ArcCosts(metrics, w).array())
          .matrix();
  return TrainOnCosts(topology, costs, h, warm_start);
}

Path ExtractPath(const Topology& topology, const QTables& tables,
                 NodeIndex src, NodeIndex dst) {
  if (src == dst) {
    Throw(ErrorKind::kValidation, "extract_path requires src != dst");
  }
  const Eigen::VectorXd& q = tables.values.at(dst);
  std::vector<bool> visited(topology.num_nodes(), false);
  Path path{{src}};
  visited[src] = true;
  NodeIndex cur = src;
  while (cur != dst) {
    ArcIndex best = -1;
    for (ArcIndex a : topology.out_arcs(cur)) {
      if (visited[topology.arcs()[a].dst]) continue;
      if (best < 0 || q[a] < q[best]) best = a;
    }
    if (best < 0) {
      throw ExtractionFailure("path extraction failed for " +
                                  topology.name(src) + " -> " +
                                  topology.name(dst) + ": dead end at " +
                                  topology.name(cur),
                              src, dst);
    }
    cur = topology.arcs()[best].dst;
    visited[cur] = true;
    path.nodes.push_back(cur);
  }
  return path;
}

RouteSet ExtractAllPaths(const Topology& topology, const QTables& tables) {
  RouteSet routes(topology.num_nodes());
  for (NodeIndex s = 0; s < topology.num_nodes(); ++s) {
    for (NodeIndex d = 0; d < topology.num_nodes(); ++d) {
      if (s != d) routes.set(s, d, ExtractPath(topology, tables, s, d));
    }
  }
  return routes;
}

RouteSet AllPairsPaths(const Topology& topology,
                       const NormalizedMetrics& metrics,
                       const RewardWeights& w, const Hyperparams& h) {
  return ExtractAllPaths(topology, Train(topology, metrics, w, h));
}

std::string WriteQTablesCsv(const Topology& topology, const QTables& tables) {
  std::string out = "dst,state,action_src,action_dst,qvalue\n";
  for (NodeIndex d = 0; d < topology.num_nodes(); ++d) {
    for (ArcIndex a = 0; a < topology.num_arcs(); ++a) {
      const Arc& arc = topology.arcs()[a];
      if (arc.src == d) continue;
      out += topology.name(d) + "," + topology.name(arc.src) + "," +
             topology.name(arc.src) + "," + topology.name(arc.dst) + "," +
             FormatDouble(tables.values[d][a]) + "\n";
    }
  }
  return out;
}

QTables ParseQTablesCsv(const Topology& topology, std::string_view text) {
  const auto lines = SplitLines(text);
  if (lines.empty() ||
      Trim(lines[0]) != "dst,state,action_src,action_dst,qvalue") {
    Throw(ErrorKind::kParse, "q-tables: bad header");
  }
  QTables tables;
  tables.values.assign(topology.num_nodes(),
                       Eigen::VectorXd::Zero(topology.num_arcs()));
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (Trim(lines[i]).empty()) continue;
    const std::string where = "q-tables line " + std::to_string(i + 1);
    const auto f = SplitCsvLine(lines[i]);
    if (f.size() != 5) Throw(ErrorKind::kParse, where + ": expected 5 fields");
    const NodeIndex d = topology.NodeOrThrow(Trim(f[0]));
    const NodeIndex state = topology.NodeOrThrow(Trim(f[1]));
    const NodeIndex u = topology.NodeOrThrow(Trim(f[2]));
    const NodeIndex v = topology.NodeOrThrow(Trim(f[3]));
    const auto arc = topology.FindArc(u, v);
    if (!arc || state != u) {
      Throw(ErrorKind::kParse, where + ": action is not a link out of state");
    }
    tables.values[d][*arc] = ParseDouble(f[4], where);
  }
  return tables;
}

}  // namespace xnet
