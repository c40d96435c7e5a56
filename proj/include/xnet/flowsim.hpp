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

// Flow-level data plane: routes + demand -> per-arc load, available bandwidth,
// delay and loss, and the min-max normalized features the reward consumes.

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <concepts>
#include <string>
#include <string_view>
#include <vector>

#include "xnet/netcore.hpp"

namespace xnet {

/// Utilization cap of the queueing delay model.
inline constexpr double kMaxUtilization = 0.99;

/// prop / (1 - rho), rho = min(load / capacity, kMaxUtilization).
template <std::floating_point Scalar>
Scalar LinkDelay(Scalar capacity, Scalar load, Scalar prop_delay) {
  const Scalar rho =
      std::min(load / capacity, static_cast<Scalar>(kMaxUtilization));
  return prop_delay / (Scalar(1) - rho);
}

/// Fluid loss: the share of offered load above capacity.
template <std::floating_point Scalar>
Scalar LinkLoss(Scalar capacity, Scalar load) {
  if (load <= Scalar(0)) return Scalar(0);
  return std::max(Scalar(0), (load - capacity) / load);
}

/// Array forms of the two models above.
template <typename Derived>
Eigen::ArrayXd LinkDelay(const Eigen::ArrayBase<Derived>& capacity,
                         const Eigen::ArrayBase<Derived>& load,
                         const Eigen::ArrayBase<Derived>& prop_delay) {
  const Eigen::ArrayXd rho = (load / capacity).min(kMaxUtilization);
  return prop_delay / (1.0 - rho);
}

template <typename Derived>
Eigen::ArrayXd LinkLoss(const Eigen::ArrayBase<Derived>& capacity,
                        const Eigen::ArrayBase<Derived>& load) {
  return (load > 0.0).select(((load - capacity) / load).max(0.0), 0.0);
}

/// Per-arc measurements, indexed by ArcIndex.
struct LinkMetrics {
  Eigen::ArrayXd capacity;
  Eigen::ArrayXd prop_delay;
  Eigen::ArrayXd load;
  Eigen::ArrayXd available;
  Eigen::ArrayXd delay;
  Eigen::ArrayXd loss;

  Eigen::Index size() const { return load.size(); }
};

/// Column order of NormalizedMetrics.
enum MetricColumn : int { kBwd = 0, kDelay = 1, kPkloss = 2 };
inline constexpr std::string_view kMetricNames[] = {"bwd_hat", "delay_hat",
                                                    "pkloss_hat"};

/// One row per arc: (bwd_hat, delay_hat, pkloss_hat), each in [0, 1].
/// bwd_hat grows as available bandwidth shrinks.
using NormalizedMetrics = Eigen::Matrix<double, Eigen::Dynamic, 3>;

/// Path per ordered pair, stored densely (row-major src x dst). The diagonal
/// holds empty paths.
class RouteSet {
 public:
  explicit RouteSet(int num_nodes)
      : num_nodes_(num_nodes), paths_(num_nodes * num_nodes) {}

  int num_nodes() const { return num_nodes_; }
  const Path& at(NodeIndex src, NodeIndex dst) const {
    return paths_[src * num_nodes_ + dst];
  }
  void set(NodeIndex src, NodeIndex dst, Path path) {
    paths_[src * num_nodes_ + dst] = std::move(path);
  }

  /// Every off-diagonal pair holds a valid path.
  bool IsComplete(const Topology& topology) const;

 private:
  int num_nodes_;
  std::vector<Path> paths_;
};

/// Shortest-hop routes for every ordered pair.
RouteSet ShortestPathRoutes(const Topology& topology);

/// Metrics of the unloaded network.
LinkMetrics IdleMetrics(const Topology& topology);

/// Loads every demand onto its route and derives delay and loss per arc.
/// Throws Error(kValidation) if a route uses a non-existent arc or a demand
/// has no route.
LinkMetrics ApplyRoutes(const Topology& topology, const RouteSet& routes,
                        const TrafficMatrix& tm);

/// Per-snapshot min-max scaling; constant columns map to 0.
NormalizedMetrics NormalizeMetrics(const LinkMetrics& metrics);

/// (x - min) / (max - min), or zeros when the range is empty.
Eigen::ArrayXd MinMaxScale(const Eigen::ArrayXd& values);

std::string WriteLinkMetricsCsv(const Topology& topology,
                                const LinkMetrics& metrics);
LinkMetrics ParseLinkMetricsCsv(const Topology& topology,
                                std::string_view text);

}  // namespace xnet
