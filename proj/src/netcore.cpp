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

#include "xnet/netcore.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <numbers>
#include <set>
#include <sstream>

#include "xnet/common.hpp"

namespace xnet {
namespace {

std::uint64_t ArcKey(NodeIndex u, NodeIndex v) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(u)) << 32) |
         static_cast<std::uint32_t>(v);
}

std::string RowLabel(std::size_t row) {
  return "link " + std::to_string(row + 1);
}

// Node ids, capacity tiers: 10G -> 100, 2.5G -> 25, 155M -> 1.55.
constexpr std::string_view kGeantCsv =
    "# GEANT, 23 nodes / 37 links, capacities scaled 1:100\n"
    "src,dst,capacity_mbps,prop_delay_ms\n"
    "AT,DE1,100,1\n"
    "AT,HU,25,1\n"
    "AT,SI,25,1\n"
    "AT,SK,25,1\n"
    "AT,IT,25,1\n"
    "BE,NL,25,1\n"
    "BE,FR,25,1\n"
    "CH,DE1,100,1\n"
    "CH,FR,100,1\n"
    "CH,IT,100,1\n"
    "CZ,DE1,25,1\n"
    "CZ,PL,25,1\n"
    "CZ,SK,25,1\n"
    "DE1,DE2,100,1\n"
    "DE1,NL,100,1\n"
    "DE1,FR,100,1\n"
    "DE1,SE,100,1\n"
    "DE1,IL,1.55,1\n"
    "DE2,IT,100,1\n"
    "DE2,GR,25,1\n"
    "DE2,PL,25,1\n"
    "DE2,NY,25,1\n"
    "ES,FR,25,1\n"
    "ES,IT,25,1\n"
    "ES,PT,25,1\n"
    "FR,UK,100,1\n"
    "FR,LU,25,1\n"
    "GR,IT,25,1\n"
    "HR,HU,25,1\n"
    "HR,SI,1.55,1\n"
    "HU,SK,1.55,1\n"
    "IE,UK,25,1\n"
    "IL,IT,1.55,1\n"
    "NL,UK,100,1\n"
    "NY,UK,25,1\n"
    "SE,UK,100,1\n"
    "PT,UK,1.55,1\n";

// Scales per-pair base rates; chosen so the busiest window pushes the
// backbone into congestion while night traffic stays light.
constexpr double kSynthLoadFactor = 2.0;

}  // namespace

Topology Topology::Create(std::vector<Link> links, bool directed) {
  Topology t;
  t.directed_ = directed;
  std::set<std::string> ids;
  std::set<std::pair<std::string, std::string>> seen;
  for (std::size_t i = 0; i < links.size(); ++i) {
    const Link& l = links[i];
    if (l.src.empty() || l.dst.empty()) {
      Throw(ErrorKind::kValidation, RowLabel(i) + ": empty node id");
    }
    if (l.src == l.dst) {
      Throw(ErrorKind::kValidation,
            RowLabel(i) + ": self-loop at node " + l.src);
    }
    if (!(l.capacity_mbps > 0.0) || !std::isfinite(l.capacity_mbps)) {
      Throw(ErrorKind::kValidation,
            RowLabel(i) + ": capacity must be a finite positive number");
    }
    if (!(l.prop_delay_ms >= 0.0) || !std::isfinite(l.prop_delay_ms)) {
      Throw(ErrorKind::kValidation,
            RowLabel(i) + ": propagation delay must be finite and >= 0");
    }
    auto key = std::make_pair(l.src, l.dst);
    if (!directed && key.first > key.second) std::swap(key.first, key.second);
    if (!seen.insert(key).second) {
      Throw(ErrorKind::kValidation, RowLabel(i) + ": duplicate link " + l.src +
                                        "-" + l.dst);
    }
    ids.insert(l.src);
    ids.insert(l.dst);
  }
  if (ids.size() < 2) {
    Throw(ErrorKind::kValidation, "topology needs at least two nodes");
  }
  t.nodes_.assign(ids.begin(), ids.end());
  for (std::size_t i = 0; i < t.nodes_.size(); ++i) {
    t.index_.emplace(t.nodes_[i], static_cast<NodeIndex>(i));
  }
  t.links_ = std::move(links);
  t.out_arcs_.resize(t.nodes_.size());
  auto add_arc = [&](NodeIndex u, NodeIndex v, const Link& l, int link) {
    const ArcIndex a = static_cast<ArcIndex>(t.arcs_.size());
    t.arcs_.push_back({u, v, l.capacity_mbps, l.prop_delay_ms, link});
    t.out_arcs_[u].push_back(a);
    t.arc_lookup_.emplace(ArcKey(u, v), a);
  };
  for (std::size_t i = 0; i < t.links_.size(); ++i) {
    const Link& l = t.links_[i];
    const NodeIndex u = t.index_.at(l.src);
    const NodeIndex v = t.index_.at(l.dst);
    add_arc(u, v, l, static_cast<int>(i));
    if (!directed) add_arc(v, u, l, static_cast<int>(i));
  }
  for (auto& out : t.out_arcs_) {
    std::sort(out.begin(), out.end(), [&](ArcIndex a, ArcIndex b) {
      return t.arcs_[a].dst < t.arcs_[b].dst;
    });
  }
  // Every node must reach every other node (strong connectivity when
  // directed); reachability to and from node 0 is sufficient.
  const std::vector<int> to_root = HopDistancesTo(t, 0);
  std::vector<bool> from_root(t.nodes_.size(), false);
  std::deque<NodeIndex> queue{0};
  from_root[0] = true;
  while (!queue.empty()) {
    const NodeIndex u = queue.front();
    queue.pop_front();
    for (ArcIndex a : t.out_arcs_[u]) {
      const NodeIndex v = t.arcs_[a].dst;
      if (!from_root[v]) {
        from_root[v] = true;
        queue.push_back(v);
      }
    }
  }
  for (NodeIndex n = 0; n < t.num_nodes(); ++n) {
    if (to_root[n] < 0 || !from_root[n]) {
      Throw(ErrorKind::kValidation, "disconnected graph: node " +
                                        t.nodes_[n] + " is not connected to " +
                                        t.nodes_[0]);
    }
  }
  return t;
}

std::optional<NodeIndex> Topology::FindNode(std::string_view id) const {
  const auto it = index_.find(std::string(id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

NodeIndex Topology::NodeOrThrow(std::string_view id) const {
  if (auto n = FindNode(id)) return *n;
  Throw(ErrorKind::kValidation, "unknown node '" + std::string(id) + "'");
}

std::optional<ArcIndex> Topology::FindArc(NodeIndex u, NodeIndex v) const {
  const auto it = arc_lookup_.find(ArcKey(u, v));
  if (it == arc_lookup_.end()) return std::nullopt;
  return it->second;
}

std::string WriteTopologyCsv(const Topology& topology) {
  std::string out;
  if (topology.directed()) out += "# directed\n";
  out += "src,dst,capacity_mbps,prop_delay_ms\n";
  for (const Link& l : topology.links()) {
    out += l.src + "," + l.dst + "," + FormatDouble(l.capacity_mbps) + "," +
           FormatDouble(l.prop_delay_ms) + "\n";
  }
  return out;
}

Topology ParseTopologyCsv(std::string_view text) {
  bool directed = false;
  bool header_seen = false;
  std::vector<Link> links;
  const auto lines = SplitLines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string line = Trim(lines[i]);
    const std::string where = "line " + std::to_string(i + 1);
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (Trim(line.substr(1)) == "directed") directed = true;
      continue;
    }
    auto fields = SplitCsvLine(line);
    for (auto& f : fields) f = Trim(f);
    if (!header_seen) {
      const bool ok = fields.size() >= 3 && fields[0] == "src" &&
                      fields[1] == "dst" && fields[2] == "capacity_mbps" &&
                      (fields.size() == 3 ||
                       (fields.size() == 4 && fields[3] == "prop_delay_ms"));
      if (!ok) {
        Throw(ErrorKind::kParse,
              where + ": expected header src,dst,capacity_mbps,prop_delay_ms");
      }
      header_seen = true;
      continue;
    }
    if (fields.size() < 3 || fields.size() > 4) {
      Throw(ErrorKind::kParse, where + ": expected 3 or 4 fields, got " +
                                   std::to_string(fields.size()));
    }
    Link l;
    l.src = fields[0];
    l.dst = fields[1];
    l.capacity_mbps = ParseDouble(fields[2], where);
    if (fields.size() == 4 && !fields[3].empty()) {
      l.prop_delay_ms = ParseDouble(fields[3], where);
    }
    links.push_back(std::move(l));
  }
  if (!header_seen) Throw(ErrorKind::kParse, "missing topology header");
  return Topology::Create(std::move(links), directed);
}

Topology LoadTopology(const std::filesystem::path& path) {
  return ParseTopologyCsv(ReadFile(path));
}

std::string TopologyHash(const Topology& topology) {
  return Fnv1aHex(WriteTopologyCsv(topology));
}

std::string_view BuiltinGeantCsv() { return kGeantCsv; }

const Topology& BuiltinGeant() {
  static const Topology geant = ParseTopologyCsv(kGeantCsv);
  return geant;
}

bool IsValidPath(const Topology& topology, const Path& path, NodeIndex src,
                 NodeIndex dst) {
  if (path.nodes.size() < 2) return false;
  if (path.nodes.front() != src || path.nodes.back() != dst) return false;
  std::vector<bool> seen(topology.num_nodes(), false);
  for (std::size_t i = 0; i < path.nodes.size(); ++i) {
    const NodeIndex n = path.nodes[i];
    if (n < 0 || n >= topology.num_nodes() || seen[n]) return false;
    seen[n] = true;
    if (i > 0 && !topology.FindArc(path.nodes[i - 1], n)) return false;
  }
  return true;
}

std::vector<int> HopDistancesTo(const Topology& topology, NodeIndex dst) {
  // Reverse BFS: walk arcs backwards from dst.
  std::vector<std::vector<NodeIndex>> in(topology.num_nodes());
  for (const Arc& a : topology.arcs()) in[a.dst].push_back(a.src);
  std::vector<int> dist(topology.num_nodes(), -1);
  std::deque<NodeIndex> queue{dst};
  dist[dst] = 0;
  while (!queue.empty()) {
    const NodeIndex v = queue.front();
    queue.pop_front();
    for (NodeIndex u : in[v]) {
      if (dist[u] < 0) {
        dist[u] = dist[v] + 1;
        queue.push_back(u);
      }
    }
  }
  return dist;
}

Path ShortestPathHops(const Topology& topology, NodeIndex src, NodeIndex dst) {
  if (src == dst) {
    Throw(ErrorKind::kValidation, "shortest path requires src != dst");
  }
  const std::vector<int> dist = HopDistancesTo(topology, dst);
  if (dist[src] < 0) {
    Throw(ErrorKind::kRuntime, "unreachable pair " + topology.name(src) +
                                   " -> " + topology.name(dst));
  }
  Path path{{src}};
  NodeIndex cur = src;
  while (cur != dst) {
    // out_arcs are sorted by head id, so the first arc that makes progress
    // gives the lexicographically smallest continuation.
    for (ArcIndex a : topology.out_arcs(cur)) {
      const NodeIndex next = topology.arcs()[a].dst;
      if (dist[next] == dist[cur] - 1) {
        cur = next;
        break;
      }
    }
    path.nodes.push_back(cur);
  }
  return path;
}

void ValidateTrafficMatrix(const Topology& topology, const TrafficMatrix& tm) {
  const int n = topology.num_nodes();
  if (tm.demand.rows() != n || tm.demand.cols() != n) {
    Throw(ErrorKind::kValidation,
          "traffic matrix '" + tm.tag + "' has dimension " +
              std::to_string(tm.demand.rows()) + "x" +
              std::to_string(tm.demand.cols()) + ", topology has " +
              std::to_string(n) + " nodes");
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double v = tm.demand(i, j);
      if (!std::isfinite(v) || v < 0.0) {
        Throw(ErrorKind::kValidation,
              "traffic matrix '" + tm.tag + "': invalid rate at (" +
                  topology.name(i) + "," + topology.name(j) + ")");
      }
      if (i == j && v != 0.0) {
        Throw(ErrorKind::kValidation, "traffic matrix '" + tm.tag +
                                          "': non-zero diagonal at " +
                                          topology.name(i));
      }
    }
  }
}

TrafficMatrix ParseTrafficMatrixCsv(const Topology& topology,
                                    std::string_view text,
                                    const std::string& fallback_tag) {
  std::vector<std::vector<std::string>> rows;
  for (const std::string& raw : SplitLines(text)) {
    const std::string line = Trim(raw);
    if (line.empty() || line[0] == '#') continue;
    auto fields = SplitCsvLine(line);
    for (auto& f : fields) f = Trim(f);
    rows.push_back(std::move(fields));
  }
  const int n = topology.num_nodes();
  if (rows.empty()) Throw(ErrorKind::kParse, "empty traffic matrix");
  const auto& header = rows.front();
  if (static_cast<int>(header.size()) != n + 1 ||
      static_cast<int>(rows.size()) != n + 1) {
    Throw(ErrorKind::kParse,
          "dimension mismatch: expected " + std::to_string(n + 1) + "x" +
              std::to_string(n + 1) + " cells (ids + " + std::to_string(n) +
              " nodes), got " + std::to_string(rows.size()) + " rows and " +
              std::to_string(header.size()) + " header columns");
  }
  std::vector<NodeIndex> col_node(n);
  std::vector<bool> used(n, false);
  for (int j = 0; j < n; ++j) {
    const auto node = topology.FindNode(header[j + 1]);
    if (!node || used[*node]) {
      Throw(ErrorKind::kParse,
            "header column " + std::to_string(j + 2) + ": unknown or repeated "
            "node '" + header[j + 1] + "'");
    }
    used[*node] = true;
    col_node[j] = *node;
  }
  TrafficMatrix tm;
  tm.tag = header[0].empty() ? fallback_tag : header[0];
  tm.demand = Eigen::MatrixXd::Zero(n, n);
  std::vector<bool> row_used(n, false);
  for (int r = 1; r <= n; ++r) {
    const auto& fields = rows[r];
    const std::string where = "row " + std::to_string(r + 1);
    if (static_cast<int>(fields.size()) != n + 1) {
      Throw(ErrorKind::kParse, where + ": dimension mismatch, expected " +
                                   std::to_string(n + 1) + " cells, got " +
                                   std::to_string(fields.size()));
    }
    const auto src = topology.FindNode(fields[0]);
    if (!src || row_used[*src]) {
      Throw(ErrorKind::kParse,
            where + ": unknown or repeated node '" + fields[0] + "'");
    }
    row_used[*src] = true;
    for (int j = 0; j < n; ++j) {
      const double v = ParseDouble(fields[j + 1], where);
      if (v < 0.0) {
        Throw(ErrorKind::kValidation, where + ": negative rate " + fields[j + 1]);
      }
      tm.demand(*src, col_node[j]) = v;
    }
  }
  ValidateTrafficMatrix(topology, tm);
  return tm;
}

TrafficMatrix LoadTrafficMatrix(const Topology& topology,
                                const std::filesystem::path& path) {
  std::string tag = path.stem().string();
  int hh = 0, mm = 0;
  char tail = 0;
  if (std::sscanf(tag.c_str(), "tm_%2d-%2d%c", &hh, &mm, &tail) == 2) {
    char buf[8];
    std::snprintf(buf, sizeof(buf), "%02d:%02d", hh, mm);
    tag = buf;
  }
  TrafficMatrix tm = ParseTrafficMatrixCsv(topology, ReadFile(path), tag);
  // The filename tag wins over the header cell when both are present.
  if (tag != path.stem().string()) tm.tag = tag;
  return tm;
}

std::string WriteTrafficMatrixCsv(const Topology& topology,
                                  const TrafficMatrix& tm) {
  std::string out = tm.tag;
  for (const auto& id : topology.nodes()) out += "," + id;
  out += "\n";
  for (int i = 0; i < topology.num_nodes(); ++i) {
    out += topology.name(i);
    for (int j = 0; j < topology.num_nodes(); ++j) {
      out += "," + FormatDouble(tm.demand(i, j));
    }
    out += "\n";
  }
  return out;
}

std::string TrafficMatrixFileName(const std::string& tag) {
  std::string name = "tm_" + tag + ".csv";
  std::replace(name.begin(), name.end(), ':', '-');
  return name;
}

std::optional<int> TagMinutes(std::string_view tag) {
  auto digit = [&](int i) { return tag[i] >= '0' && tag[i] <= '9'; };
  if (tag.size() != 5 || tag[2] != ':' || !digit(0) || !digit(1) || !digit(3) ||
      !digit(4)) {
    return std::nullopt;
  }
  const int hh = (tag[0] - '0') * 10 + (tag[1] - '0');
  const int mm = (tag[3] - '0') * 10 + (tag[4] - '0');
  if (hh < 0 || hh > 23 || mm < 0 || mm > 59) return std::nullopt;
  return hh * 60 + mm;
}

double DiurnalProfile(double hour) {
  // Raised cosine centred at 09:00, halved at night.
  const double phase = 2.0 * std::numbers::pi * (hour - 9.0) / 24.0;
  return 0.5 + 0.25 * (1.0 + std::cos(phase));
}

bool IsPeakTag(std::string_view tag) {
  const auto minutes = TagMinutes(tag);
  return minutes && *minutes >= 5 * 60 && *minutes < 13 * 60;
}

std::vector<TrafficMatrix> SynthDiurnal(const Topology& topology, int n,
                                        std::uint64_t seed,
                                        double peak_scale) {
  if (n < 1) Throw(ErrorKind::kValidation, "synth_diurnal: n must be >= 1");
  if (!(peak_scale > 0.0 && peak_scale <= 1.0)) {
    Throw(ErrorKind::kValidation, "synth_diurnal: peak_scale must be in (0,1]");
  }
  const int nodes = topology.num_nodes();
  std::vector<double> attached(nodes, 0.0);
  for (const Arc& a : topology.arcs()) {
    attached[a.dst] = std::max(attached[a.dst], a.capacity_mbps);
  }
  Rng base_rng(MixSeed(seed, 0));
  Eigen::MatrixXd base = Eigen::MatrixXd::Zero(nodes, nodes);
  for (int s = 0; s < nodes; ++s) {
    for (int d = 0; d < nodes; ++d) {
      if (s == d) continue;
      base(s, d) = base_rng.Uniform() * attached[d] * kSynthLoadFactor /
                   static_cast<double>(nodes - 1);
    }
  }
  std::vector<TrafficMatrix> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) {
    const int minutes =
        static_cast<int>(std::lround((i + 0.5) * 1440.0 / n)) % 1440;
    char buf[8];
    std::snprintf(buf, sizeof(buf), "%02d:%02d", minutes / 60, minutes % 60);
    const double level = peak_scale * DiurnalProfile(minutes / 60.0);
    Rng jitter(MixSeed(seed, 1 + static_cast<std::uint64_t>(i)));
    TrafficMatrix tm{buf, Eigen::MatrixXd::Zero(nodes, nodes)};
    for (int s = 0; s < nodes; ++s) {
      for (int d = 0; d < nodes; ++d) {
        const double j = jitter.Uniform(0.75, 1.25);
        if (s != d) tm.demand(s, d) = base(s, d) * level * j;
      }
    }
    out.push_back(std::move(tm));
  }
  return out;
}

}  // namespace xnet
