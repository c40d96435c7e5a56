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

#include "xnet/flowsim.hpp"

#include "xnet/common.hpp"

namespace xnet {
namespace {

LinkMetrics WithLoad(const Topology& topology, Eigen::ArrayXd load) {
  const int m = topology.num_arcs();
  LinkMetrics out;
  out.capacity.resize(m);
  out.prop_delay.resize(m);
  for (int a = 0; a < m; ++a) {
    out.capacity[a] = topology.arcs()[a].capacity_mbps;
    out.prop_delay[a] = topology.arcs()[a].prop_delay_ms;
  }
  out.load = std::move(load);
  out.available = (out.capacity - out.load).max(0.0);
  out.delay = LinkDelay(out.capacity, out.load, out.prop_delay);
  out.loss = LinkLoss(out.capacity, out.load);
  return out;
}

}  // namespace

bool RouteSet::IsComplete(const Topology& topology) const {
  for (NodeIndex s = 0; s < num_nodes_; ++s) {
    for (NodeIndex d = 0; d < num_nodes_; ++d) {
      if (s != d && !IsValidPath(topology, at(s, d), s, d)) return false;
    }
  }
  return true;
}

RouteSet ShortestPathRoutes(const Topology& topology) {
  RouteSet routes(topology.num_nodes());
  for (NodeIndex s = 0; s < topology.num_nodes(); ++s) {
    for (NodeIndex d = 0; d < topology.num_nodes(); ++d) {
      if (s != d) routes.set(s, d, ShortestPathHops(topology, s, d));
    }
  }
  return routes;
}

LinkMetrics IdleMetrics(const Topology& topology) {
  return WithLoad(topology, Eigen::ArrayXd::Zero(topology.num_arcs()));
}

LinkMetrics ApplyRoutes(const Topology& topology, const RouteSet& routes,
                        const TrafficMatrix& tm) {
  ValidateTrafficMatrix(topology, tm);
  if (routes.num_nodes() != topology.num_nodes()) {
    Throw(ErrorKind::kValidation, "route set does not match topology size");
  }
  Eigen::ArrayXd load = Eigen::ArrayXd::Zero(topology.num_arcs());
  for (NodeIndex s = 0; s < topology.num_nodes(); ++s) {
    for (NodeIndex d = 0; d < topology.num_nodes(); ++d) {
      const double rate = tm.demand(s, d);
      if (s == d || rate == 0.0) continue;
      const Path& path = routes.at(s, d);
      if (path.nodes.size() < 2) {
        Throw(ErrorKind::kValidation, "no route for demand " +
                                          topology.name(s) + " -> " +
                                          topology.name(d));
      }
      for (std::size_t i = 1; i < path.nodes.size(); ++i) {
        const auto arc = topology.FindArc(path.nodes[i - 1], path.nodes[i]);
        if (!arc) {
          Throw(ErrorKind::kValidation,
                "route " + topology.name(s) + " -> " + topology.name(d) +
                    " uses unknown link " + topology.name(path.nodes[i - 1]) +
                    "-" + topology.name(path.nodes[i]));
        }
        load[*arc] += rate;
      }
    }
  }
  return WithLoad(topology, std::move(load));
}

Eigen::ArrayXd MinMaxScale(const Eigen::ArrayXd& values) {
  if (values.size() == 0) return values;
  const double lo = values.minCoeff();
  const double hi = values.maxCoeff();
  if (!(hi > lo)) return Eigen::ArrayXd::Zero(values.size());
  return ((values - lo) / (hi - lo)).max(0.0).min(1.0);
}

NormalizedMetrics NormalizeMetrics(const LinkMetrics& metrics) {
  if (metrics.size() == 0) {
    Throw(ErrorKind::kValidation, "normalize_metrics: no links");
  }
  NormalizedMetrics out(metrics.size(), 3);
  out.col(kBwd) = (1.0 - MinMaxScale(metrics.available)).matrix();
  out.col(kDelay) = MinMaxScale(metrics.delay).matrix();
  out.col(kPkloss) = MinMaxScale(metrics.loss).matrix();
  return out;
}

std::string WriteLinkMetricsCsv(const Topology& topology,
                                const LinkMetrics& metrics) {
  std::string out = "src,dst,load_mbps,available_mbps,delay_ms,loss\n";
  for (int a = 0; a < topology.num_arcs(); ++a) {
    const Arc& arc = topology.arcs()[a];
    out += topology.name(arc.src) + "," + topology.name(arc.dst) + "," +
           FormatDouble(metrics.load[a]) + "," +
           FormatDouble(metrics.available[a]) + "," +
           FormatDouble(metrics.delay[a]) + "," + FormatDouble(metrics.loss[a]) +
           "\n";
  }
  return out;
}

LinkMetrics ParseLinkMetricsCsv(const Topology& topology,
                                std::string_view text) {
  const auto lines = SplitLines(text);
  if (lines.empty() ||
      Trim(lines[0]) != "src,dst,load_mbps,available_mbps,delay_ms,loss") {
    Throw(ErrorKind::kParse, "link metrics: bad header");
  }
  LinkMetrics m = IdleMetrics(topology);
  std::vector<bool> seen(topology.num_arcs(), false);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (Trim(lines[i]).empty()) continue;
    const std::string where = "link metrics line " + std::to_string(i + 1);
    const auto f = SplitCsvLine(lines[i]);
    if (f.size() != 6) Throw(ErrorKind::kParse, where + ": expected 6 fields");
    const auto arc = topology.FindArc(topology.NodeOrThrow(Trim(f[0])),
                                      topology.NodeOrThrow(Trim(f[1])));
    if (!arc || seen[*arc]) {
      Throw(ErrorKind::kParse, where + ": unknown or repeated link");
    }
    seen[*arc] = true;
    m.load[*arc] = ParseDouble(f[2], where);
    m.available[*arc] = ParseDouble(f[3], where);
    m.delay[*arc] = ParseDouble(f[4], where);
    m.loss[*arc] = ParseDouble(f[5], where);
  }
  for (int a = 0; a < topology.num_arcs(); ++a) {
    if (!seen[a]) {
      Throw(ErrorKind::kParse, "link metrics: missing link " +
                                   topology.name(topology.arcs()[a].src) + "-" +
                                   topology.name(topology.arcs()[a].dst));
    }
  }
  return m;
}

}  // namespace xnet
