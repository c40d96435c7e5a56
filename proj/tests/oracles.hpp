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

// Independent reference implementations used by the unit and acceptance
// tests. Nothing here calls into the code under test except for the plain
// data types.

#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <functional>
#include <limits>
#include <numeric>
#include <queue>
#include <random>
#include <string>
#include <vector>

#include "xnet/netcore.hpp"
#include "xnet/surrogate.hpp"

namespace oracle {

/// Connected undirected graph on n nodes: a random spanning tree plus extra
/// edges with probability `p`. Node ids are "n0".."n{n-1}".
inline xnet::Topology RandomConnectedGraph(int n, double p, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<std::vector<bool>> adj(n, std::vector<bool>(n, false));
  std::vector<xnet::Link> links;
  auto add = [&](int a, int b) {
    adj[a][b] = adj[b][a] = true;
    links.push_back({"n" + std::to_string(a), "n" + std::to_string(b),
                     1.0 + 9.0 * u(rng), 1.0});
  };
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  for (int i = 1; i < n; ++i) {
    std::uniform_int_distribution<int> pick(0, i - 1);
    add(order[i], order[pick(rng)]);
  }
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      if (!adj[a][b] && u(rng) < p) add(a, b);
    }
  }
  return xnet::Topology::Create(links);
}

/// Single-destination shortest distances over arc costs (Dijkstra on the
/// reversed graph).
inline std::vector<double> DijkstraTo(const xnet::Topology& t,
                                      const Eigen::VectorXd& cost, int dst) {
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(t.num_nodes(), inf);
  std::vector<std::vector<int>> in(t.num_nodes());
  for (int a = 0; a < t.num_arcs(); ++a) in[t.arcs()[a].dst].push_back(a);
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  dist[dst] = 0.0;
  pq.push({0.0, dst});
  while (!pq.empty()) {
    auto [d, v] = pq.top();
    pq.pop();
    if (d > dist[v]) continue;
    for (int a : in[v]) {
      const int u = t.arcs()[a].src;
      if (d + cost[a] < dist[u]) {
        dist[u] = d + cost[a];
        pq.push({dist[u], u});
      }
    }
  }
  return dist;
}

inline double PathCost(const xnet::Topology& t, const Eigen::VectorXd& cost,
                       const xnet::Path& p) {
  double c = 0.0;
  for (std::size_t i = 0; i + 1 < p.nodes.size(); ++i) {
    c += cost[*t.FindArc(p.nodes[i], p.nodes[i + 1])];
  }
  return c;
}

/// Every simple path from src to dst by depth-first enumeration.
inline void SimplePaths(const xnet::Topology& t, int src, int dst,
                        std::vector<std::vector<int>>& out) {
  std::vector<int> stack{src};
  std::vector<bool> seen(t.num_nodes(), false);
  seen[src] = true;
  std::function<void(int)> rec = [&](int v) {
    if (v == dst) {
      out.push_back(stack);
      return;
    }
    for (int w = 0; w < t.num_nodes(); ++w) {
      if (seen[w] || !t.FindArc(v, w)) continue;
      seen[w] = true;
      stack.push_back(w);
      rec(w);
      stack.pop_back();
      seen[w] = false;
    }
  };
  rec(src);
}

/// v(S) by direct averaging over the background.
inline double CoalitionValue(const std::function<double(const std::vector<double>&)>& f,
                             const std::vector<double>& x,
                             const xnet::FeatureMatrix& bg, unsigned mask) {
  double total = 0.0;
  std::vector<double> z(x.size());
  for (Eigen::Index r = 0; r < bg.rows(); ++r) {
    for (std::size_t j = 0; j < x.size(); ++j) {
      z[j] = (mask >> j) & 1u ? x[j] : bg(r, static_cast<Eigen::Index>(j));
    }
    total += f(z);
  }
  return total / static_cast<double>(bg.rows());
}

/// Shapley values as the average marginal contribution over all M!
/// feature orderings.
inline std::vector<double> PermutationShapley(
    const std::function<double(const std::vector<double>&)>& f,
    const std::vector<double>& x, const xnet::FeatureMatrix& bg) {
  const int m = static_cast<int>(x.size());
  std::vector<double> cache(std::size_t{1} << m,
                            std::numeric_limits<double>::quiet_NaN());
  auto v = [&](unsigned mask) {
    if (std::isnan(cache[mask])) cache[mask] = CoalitionValue(f, x, bg, mask);
    return cache[mask];
  };
  std::vector<int> perm(m);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<double> phi(m, 0.0);
  double count = 0.0;
  do {
    unsigned mask = 0;
    for (int j : perm) {
      const double before = v(mask);
      mask |= 1u << j;
      phi[j] += v(mask) - before;
    }
    count += 1.0;
  } while (std::next_permutation(perm.begin(), perm.end()));
  for (double& p : phi) p /= count;
  return phi;
}

/// Best single split by trying every midpoint between sorted distinct
/// values of every feature; returns (feature, threshold, sse).
struct Split {
  int feature = -1;
  double threshold = 0.0;
  double sse = std::numeric_limits<double>::infinity();
};

inline Split BruteForceSplit(const xnet::FeatureMatrix& x, const Eigen::VectorXd& y,
                             int min_leaf = 1) {
  Split best;
  auto sse = [](const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
    double s = 0.0;
    for (double e : v) s += (e - mean) * (e - mean);
    return s;
  };
  for (Eigen::Index f = 0; f < x.cols(); ++f) {
    std::vector<double> vals;
    for (Eigen::Index i = 0; i < x.rows(); ++i) vals.push_back(x(i, f));
    std::sort(vals.begin(), vals.end());
    vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
    for (std::size_t k = 0; k + 1 < vals.size(); ++k) {
      const double thr = 0.5 * (vals[k] + vals[k + 1]);
      std::vector<double> l, r;
      for (Eigen::Index i = 0; i < x.rows(); ++i) {
        (x(i, f) <= thr ? l : r).push_back(y[i]);
      }
      if (static_cast<int>(l.size()) < min_leaf || static_cast<int>(r.size()) < min_leaf) {
        continue;
      }
      const double s = sse(l) + sse(r);
      if (s < best.sse - 1e-12) best = {static_cast<int>(f), thr, s};
    }
  }
  return best;
}

/// Byte-wise comparison of two directory trees; returns the first
/// difference or an empty string.
inline std::string DiffTrees(const std::filesystem::path& a,
                             const std::filesystem::path& b) {
  namespace fs = std::filesystem;
  auto list = [](const fs::path& root) {
    std::vector<std::string> files;
    for (const auto& e : fs::recursive_directory_iterator(root)) {
      if (e.is_regular_file()) files.push_back(fs::relative(e.path(), root).string());
    }
    std::sort(files.begin(), files.end());
    return files;
  };
  const auto fa = list(a), fb = list(b);
  if (fa != fb) return "file lists differ";
  for (const auto& f : fa) {
    if (xnet::ReadFile(a / f) != xnet::ReadFile(b / f)) return f;
  }
  return {};
}

}  // namespace oracle
