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

// Tabular Q-learning router. One table per destination; states are nodes and
// actions are the node's outgoing arcs. Values are expected costs, so the
// greedy action is the argmin.

#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "xnet/common.hpp"
#include "xnet/flowsim.hpp"
#include "xnet/netcore.hpp"

namespace xnet {

/// Coefficients of the link cost over (bwd_hat, delay_hat, pkloss_hat).
/// Non-negative, summing to one.
class RewardWeights {
 public:
  static constexpr double kSumTolerance = 1e-9;

  /// Throws Error(kValidation) off the unit simplex.
  RewardWeights(double bwd, double delay, double pkloss);

  /// Rescales any non-negative, non-zero triple onto the simplex.
  static RewardWeights Normalized(double bwd, double delay, double pkloss);
  static RewardWeights Equal() { return {1.0 / 3, 1.0 / 3, 1.0 / 3}; }

  double bwd() const { return w_[0]; }
  double delay() const { return w_[1]; }
  double pkloss() const { return w_[2]; }
  const Eigen::Vector3d& vector() const { return w_; }

  std::string ToString() const;

  bool operator==(const RewardWeights& o) const { return w_ == o.w_; }
  /// Lexicographic over (bwd, delay, pkloss).
  bool operator<(const RewardWeights& o) const;

 private:
  Eigen::Vector3d w_;
};

struct Hyperparams {
  double alpha = 0.8;
  double gamma = 0.99;
  double epsilon = 0.1;
  int episodes_per_pair = 500;
  /// 0 selects 4 x |nodes|.
  int max_steps = 0;
  /// Train() charges cost_floor + (1 - cost_floor) * reward per hop, so links
  /// whose normalized metrics are all zero still cost something.
  double cost_floor = 0.05;
  std::uint64_t seed = 0;

  /// Throws Error(kValidation) when a field is out of range. gamma = 1 is
  /// accepted: episodes end at an absorbing destination.
  void Validate() const;
  int StepLimit(int num_nodes) const {
    return max_steps > 0 ? max_steps : 4 * num_nodes;
  }
};

/// Weighted link cost for one row of NormalizedMetrics.
template <typename Derived>
double Reward(const Eigen::MatrixBase<Derived>& metrics,
              const RewardWeights& w) {
  return metrics.dot(w.vector());
}

/// Per-arc cost vector: metrics * weights.
inline Eigen::VectorXd ArcCosts(const NormalizedMetrics& metrics,
                                const RewardWeights& w) {
  return metrics * w.vector();
}

/// q + alpha * (cost + gamma * min_next - q).
inline double QUpdate(double q, double cost, double min_next,
                      const Hyperparams& h) {
  return q + h.alpha * (cost + h.gamma * min_next - q);
}

/// Q-values per destination, each indexed by ArcIndex. Arcs leaving the
/// destination itself are not part of that destination's table.
struct QTables {
  std::vector<Eigen::VectorXd> values;

  double at(NodeIndex dst, ArcIndex arc) const { return values[dst][arc]; }
  bool operator==(const QTables& o) const { return values == o.values; }
};

/// Trains every destination table on fixed per-arc costs. `warm_start`, when
/// given, seeds the tables instead of zeros.
QTables TrainOnCosts(const Topology& topology, const Eigen::VectorXd& costs,
                     const Hyperparams& h,
                     const QTables* warm_start = nullptr);

/// Trains on the weighted reward of `metrics`.
QTables Train(const Topology& topology, const NormalizedMetrics& metrics,
              const RewardWeights& w, const Hyperparams& h,
              const QTables* warm_start = nullptr);

/// Raised when greedy descent runs out of unvisited next hops.
class ExtractionFailure : public Error {
 public:
  ExtractionFailure(const std::string& message, NodeIndex src, NodeIndex dst)
      : Error(ErrorKind::kRuntime, message), src_(src), dst_(dst) {}
  NodeIndex src() const { return src_; }
  NodeIndex dst() const { return dst_; }

 private:
  NodeIndex src_;
  NodeIndex dst_;
};

/// Greedy descent on the destination's table, never revisiting a node.
Path ExtractPath(const Topology& topology, const QTables& tables,
                 NodeIndex src, NodeIndex dst);

/// Extracts all ordered pairs from trained tables.
RouteSet ExtractAllPaths(const Topology& topology, const QTables& tables);

/// Train + extract for every ordered pair.
RouteSet AllPairsPaths(const Topology& topology,
                       const NormalizedMetrics& metrics,
                       const RewardWeights& w, const Hyperparams& h);

/// `dst,state,action_src,action_dst,qvalue`, destination-major, arcs in
/// index order.
std::string WriteQTablesCsv(const Topology& topology, const QTables& tables);
QTables ParseQTablesCsv(const Topology& topology, std::string_view text);

}  // namespace xnet
