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

// Network topology, traffic matrices and graph oracles.
//
// Nodes are kept in lexicographic order of their ids, so a node index order is
// also the id order; every tie-break in the library relies on that.

#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace xnet {

using NodeIndex = int;
using ArcIndex = int;

/// Propagation delay used when a topology row leaves it out.
inline constexpr double kDefaultPropDelayMs = 1.0;

struct Link {
  std::string src;
  std::string dst;
  double capacity_mbps = 0.0;
  double prop_delay_ms = kDefaultPropDelayMs;

  bool operator==(const Link&) const = default;
};

/// One direction of a link. Undirected links yield two arcs with the full
/// capacity each.
struct Arc {
  NodeIndex src = 0;
  NodeIndex dst = 0;
  double capacity_mbps = 0.0;
  double prop_delay_ms = 0.0;
  int link = 0;
};

class Topology {
 public:
  /// Validates and builds. Throws Error(kValidation) naming the offending
  /// link (1-based position in `links`).
  static Topology Create(std::vector<Link> links, bool directed = false);

  const std::vector<std::string>& nodes() const { return nodes_; }
  const std::vector<Link>& links() const { return links_; }
  const std::vector<Arc>& arcs() const { return arcs_; }
  bool directed() const { return directed_; }

  int num_nodes() const { return static_cast<int>(nodes_.size()); }
  int num_arcs() const { return static_cast<int>(arcs_.size()); }

  /// Outgoing arcs of `node`, sorted by the id of the arc's head.
  const std::vector<ArcIndex>& out_arcs(NodeIndex node) const {
    return out_arcs_[node];
  }

  std::optional<NodeIndex> FindNode(std::string_view id) const;
  NodeIndex NodeOrThrow(std::string_view id) const;

  /// Arc u->v, or nullopt when u and v are not adjacent.
  std::optional<ArcIndex> FindArc(NodeIndex u, NodeIndex v) const;

  const std::string& name(NodeIndex node) const { return nodes_[node]; }

  bool operator==(const Topology& other) const {
    return directed_ == other.directed_ && nodes_ == other.nodes_ &&
           links_ == other.links_;
  }

 private:
  Topology() = default;

  std::vector<std::string> nodes_;
  std::vector<Link> links_;
  std::vector<Arc> arcs_;
  std::vector<std::vector<ArcIndex>> out_arcs_;
  std::unordered_map<std::string, NodeIndex> index_;
  std::unordered_map<std::uint64_t, ArcIndex> arc_lookup_;
  bool directed_ = false;
};

/// Canonical CSV rendering (header + one row per link in stored order).
std::string WriteTopologyCsv(const Topology& topology);
Topology ParseTopologyCsv(std::string_view text);
Topology LoadTopology(const std::filesystem::path& path);

/// Stable fingerprint of the canonical CSV form.
std::string TopologyHash(const Topology& topology);

/// The bundled GEANT graph: 23 nodes, 37 links, capacities scaled to the
/// 100 / 25 / 1.55 Mbps tiers.
const Topology& BuiltinGeant();
std::string_view BuiltinGeantCsv();

/// Capacity tiers present in the bundled graph.
inline constexpr double kGeantTiersMbps[] = {100.0, 25.0, 1.55};

struct Path {
  std::vector<NodeIndex> nodes;

  int hops() const { return static_cast<int>(nodes.size()) - 1; }
  bool empty() const { return nodes.empty(); }
  bool operator==(const Path&) const = default;
};

/// True when the path is loop-free, starts at `src`, ends at `dst` and only
/// uses existing arcs.
bool IsValidPath(const Topology& topology, const Path& path, NodeIndex src,
                 NodeIndex dst);

/// Breadth-first hop distances to `dst` from every node (-1 if unreachable).
std::vector<int> HopDistancesTo(const Topology& topology, NodeIndex dst);

/// Minimum-hop path; among those, the lexicographically smallest node-id
/// sequence. Throws Error(kRuntime) if dst is unreachable.
Path ShortestPathHops(const Topology& topology, NodeIndex src, NodeIndex dst);

/// Demand in Mbps; row = source, column = destination, in topology node order.
struct TrafficMatrix {
  std::string tag;
  Eigen::MatrixXd demand;

  double total() const { return demand.sum(); }
};

/// Checks dimensions, finiteness, non-negativity and a zero diagonal.
void ValidateTrafficMatrix(const Topology& topology, const TrafficMatrix& tm);

/// Parses the square CSV form. The header row and first column carry node ids
/// and must name exactly the topology's nodes; the matrix is reordered to the
/// topology order. The tag is taken from `fallback_tag` unless the header's
/// top-left cell is non-empty.
TrafficMatrix ParseTrafficMatrixCsv(const Topology& topology,
                                    std::string_view text,
                                    const std::string& fallback_tag);

/// Loads `tm_<HH>-<MM>.csv`; the filename supplies the tag "HH:MM".
TrafficMatrix LoadTrafficMatrix(const Topology& topology,
                                const std::filesystem::path& path);

std::string WriteTrafficMatrixCsv(const Topology& topology,
                                  const TrafficMatrix& tm);

/// "HH:MM" -> "tm_HH-MM.csv".
std::string TrafficMatrixFileName(const std::string& tag);

/// Minutes after midnight encoded by an "HH:MM" tag; nullopt if malformed.
std::optional<int> TagMinutes(std::string_view tag);

/// Synthetic diurnal traffic. Tags sit at the midpoints of n equal slices of
/// the day. Per-pair base rates are uniform draws scaled by the largest
/// capacity attached to the destination, modulated by a sinusoid peaking at
/// 09:00 and a per-matrix jitter. Pure function of its arguments.
std::vector<TrafficMatrix> SynthDiurnal(const Topology& topology, int n,
                                        std::uint64_t seed, double peak_scale);

/// Diurnal multiplier in (0, 1] at a time of day given in hours.
double DiurnalProfile(double hour);

/// True when the tag falls in the busy window [05:00, 13:00).
bool IsPeakTag(std::string_view tag);

}  // namespace xnet
