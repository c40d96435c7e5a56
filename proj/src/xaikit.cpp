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

#include "xnet/xaikit.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace xnet {
namespace {

void CheckShapInputs(std::size_t m, const FeatureMatrix& background) {
  if (m == 0) Throw(ErrorKind::kValidation, "shap: instance has no features");
  if (m > static_cast<std::size_t>(kMaxShapFeatures)) {
    Throw(ErrorKind::kValidation,
          "shap: " + std::to_string(m) + " features exceed the enumeration "
          "bound of " + std::to_string(kMaxShapFeatures) +
          "; use a smaller feature set");
  }
  if (background.rows() == 0) {
    Throw(ErrorKind::kValidation, "shap: empty background set");
  }
  if (static_cast<std::size_t>(background.cols()) != m) {
    Throw(ErrorKind::kValidation, "shap: background width mismatch");
  }
}

// Adds `value` to every coalition that contains `in` and avoids `out`.
void Scatter(std::vector<double>& acc, unsigned in, unsigned out, unsigned full,
             double value) {
  const unsigned free = full & ~(in | out);
  unsigned sub = free;
  while (true) {
    acc[in | sub] += value;
    if (sub == 0) break;
    sub = (sub - 1) & free;
  }
}

// One traversal of `tree` for a (instance, background) pair. A split on a
// feature where both points agree follows the shared branch; otherwise both
// branches are visited with the feature pinned to the instance or background.
void TreeCoalitions(const RegressionTree& tree, int node,
                    std::span<const double> x, std::span<const double> b,
                    unsigned in, unsigned out, unsigned full,
                    std::vector<double>& acc) {
  const TreeNode& n = tree.nodes[node];
  if (n.is_leaf()) {
    Scatter(acc, in, out, full, n.value);
    return;
  }
  const unsigned bit = 1u << n.feature;
  const bool x_left = x[n.feature] <= n.threshold;
  const bool b_left = b[n.feature] <= n.threshold;
  if ((in & bit) || x_left == b_left) {
    TreeCoalitions(tree, x_left ? n.left : n.right, x, b, in, out, full, acc);
  } else if (out & bit) {
    TreeCoalitions(tree, b_left ? n.left : n.right, x, b, in, out, full, acc);
  } else {
    TreeCoalitions(tree, x_left ? n.left : n.right, x, b, in | bit, out, full,
                   acc);
    TreeCoalitions(tree, b_left ? n.left : n.right, x, b, in, out | bit, full,
                   acc);
  }
}

std::vector<double> TreeModelCoalitions(const std::vector<RegressionTree>& trees,
                                        std::span<const double> x,
                                        const FeatureMatrix& background) {
  const unsigned m = static_cast<unsigned>(x.size());
  const unsigned full = (1u << m) - 1;
  std::vector<double> acc(std::size_t{1} << m, 0.0);
  for (Eigen::Index r = 0; r < background.rows(); ++r) {
    std::span<const double> b(background.row(r).data(), m);
    for (const RegressionTree& t : trees) {
      TreeCoalitions(t, 0, x, b, 0, 0, full, acc);
    }
  }
  return acc;
}

}  // namespace

std::vector<double> CoalitionValues(const Predictor& f,
                                    std::span<const double> instance,
                                    const FeatureMatrix& background) {
  const std::size_t m = instance.size();
  CheckShapInputs(m, background);
  const std::size_t count = std::size_t{1} << m;
  std::vector<double> values(count, 0.0);
  std::vector<double> hybrid(m);
  for (Eigen::Index r = 0; r < background.rows(); ++r) {
    for (std::size_t mask = 0; mask < count; ++mask) {
      for (std::size_t j = 0; j < m; ++j) {
        hybrid[j] = (mask >> j) & 1u ? instance[j] : background(r, j);
      }
      values[mask] += f(hybrid);
    }
  }
  const double rows = static_cast<double>(background.rows());
  for (double& v : values) v /= rows;
  return values;
}

std::vector<double> CoalitionValues(const Model& model,
                                    std::span<const double> instance,
                                    const FeatureMatrix& background) {
  CheckShapInputs(instance.size(), background);
  const double rows = static_cast<double>(background.rows());
  if (const auto* tree = std::get_if<RegressionTree>(&model)) {
    auto acc = TreeModelCoalitions({*tree}, instance, background);
    for (double& v : acc) v /= rows;
    return acc;
  }
  if (const auto* ens = std::get_if<TreeEnsemble>(&model)) {
    auto acc = TreeModelCoalitions(ens->trees, instance, background);
    for (double& v : acc) {
      v /= rows;
      if (ens->kind == EnsembleKind::kForest) {
        v = ens->trees.empty() ? ens->base_score
                               : v / static_cast<double>(ens->trees.size());
      } else {
        v = ens->base_score + ens->eta * v;
      }
    }
    return acc;
  }
  return CoalitionValues(
      Predictor([&](std::span<const double> x) { return Predict(model, x); }),
      instance, background);
}

ShapValues ShapFromCoalitions(const std::vector<double>& values, int m) {
  if (m < 1 || m > kMaxShapFeatures ||
      values.size() != (std::size_t{1} << m)) {
    Throw(ErrorKind::kValidation, "shap: coalition table size mismatch");
  }
  // weight[s] = s! (m - s - 1)! / m!
  std::vector<double> weight(static_cast<std::size_t>(m));
  for (int s = 0; s < m; ++s) {
    double w = 1.0 / m;
    for (int k = 1; k <= s; ++k) {
      w *= static_cast<double>(k) / static_cast<double>(m - k);
    }
    weight[static_cast<std::size_t>(s)] = w;
  }
  ShapValues out;
  out.base = values[0];
  out.phi = Eigen::VectorXd::Zero(m);
  const unsigned count = 1u << m;
  for (int j = 0; j < m; ++j) {
    const unsigned bit = 1u << j;
    double phi = 0.0;
    for (unsigned s = 0; s < count; ++s) {
      if (s & bit) continue;
      phi += weight[static_cast<std::size_t>(std::popcount(s))] *
             (values[s | bit] - values[s]);
    }
    out.phi[j] = phi;
  }
  return out;
}

ShapValues ShapExact(const Predictor& f, std::span<const double> instance,
                     const FeatureMatrix& background) {
  return ShapFromCoalitions(CoalitionValues(f, instance, background),
                            static_cast<int>(instance.size()));
}

ShapValues ShapExact(const Model& model, std::span<const double> instance,
                     const FeatureMatrix& background) {
  return ShapFromCoalitions(CoalitionValues(model, instance, background),
                            static_cast<int>(instance.size()));
}

std::vector<ShapValues> ShapRows(const Model& model, const FeatureMatrix& rows,
                                 const FeatureMatrix& background) {
  std::vector<ShapValues> out(static_cast<std::size_t>(rows.rows()));
  ParallelFor(out.size(), [&](std::size_t i) {
    const auto r = static_cast<Eigen::Index>(i);
    out[i] = ShapExact(model, std::span<const double>(rows.row(r).data(),
                                                      rows.cols()),
                       background);
  });
  return out;
}

std::vector<std::pair<double, double>> ShapDependence(
    const std::vector<ShapValues>& shap, const FeatureMatrix& rows,
    int feature) {
  if (static_cast<Eigen::Index>(shap.size()) != rows.rows() || feature < 0 ||
      feature >= rows.cols()) {
    Throw(ErrorKind::kValidation, "shap_dependence: bad arguments");
  }
  std::vector<std::pair<double, double>> points;
  points.reserve(shap.size());
  for (std::size_t i = 0; i < shap.size(); ++i) {
    points.emplace_back(rows(static_cast<Eigen::Index>(i), feature),
                        shap[i].phi[feature]);
  }
  return points;
}

std::vector<std::pair<double, double>> ShapDependence(
    const Model& model, const FeatureMatrix& rows, int feature,
    const FeatureMatrix& background) {
  return ShapDependence(ShapRows(model, rows, background), rows, feature);
}

Eigen::VectorXd QuantileGrid(const FeatureMatrix& data, int feature,
                             int grid_size) {
  if (data.rows() == 0) Throw(ErrorKind::kValidation, "grid: empty dataset");
  if (feature < 0 || feature >= data.cols()) {
    Throw(ErrorKind::kValidation, "grid: feature index out of range");
  }
  if (grid_size < 1) Throw(ErrorKind::kValidation, "grid: grid_size < 1");
  std::vector<double> column(static_cast<std::size_t>(data.rows()));
  for (Eigen::Index i = 0; i < data.rows(); ++i) column[i] = data(i, feature);
  std::sort(column.begin(), column.end());
  std::vector<double> grid;
  for (int i = 0; i < grid_size; ++i) {
    const double p = grid_size == 1 ? 0.5 : static_cast<double>(i) / (grid_size - 1);
    const double pos = p * static_cast<double>(column.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, column.size() - 1);
    const double v = column[lo] + (pos - lo) * (column[hi] - column[lo]);
    if (grid.empty() || v > grid.back()) grid.push_back(v);
  }
  return Eigen::Map<Eigen::VectorXd>(grid.data(),
                                     static_cast<Eigen::Index>(grid.size()));
}

IceCurves Ice(const Predictor& f, const FeatureMatrix& data, int feature,
              int grid_size) {
  IceCurves ice;
  ice.feature = feature;
  ice.grid = QuantileGrid(data, feature, grid_size);
  ice.predictions.resize(data.rows(), ice.grid.size());
  ParallelFor(static_cast<std::size_t>(data.rows()), [&](std::size_t i) {
    const auto r = static_cast<Eigen::Index>(i);
    std::vector<double> row(data.row(r).data(), data.row(r).data() + data.cols());
    for (Eigen::Index g = 0; g < ice.grid.size(); ++g) {
      row[static_cast<std::size_t>(feature)] = ice.grid[g];
      ice.predictions(r, g) = f(row);
    }
  });
  return ice;
}

IceCurves Ice(const Model& model, const FeatureMatrix& data, int feature,
              int grid_size) {
  return Ice(Predictor([&](std::span<const double> x) { return Predict(model, x); }),
             data, feature, grid_size);
}

PdpCurve PdpFromIce(const IceCurves& ice) {
  PdpCurve pdp;
  pdp.feature = ice.feature;
  pdp.grid = ice.grid;
  pdp.mean = ice.predictions.colwise().mean().transpose();
  return pdp;
}

PdpCurve Pdp(const Predictor& f, const FeatureMatrix& data, int feature,
             int grid_size) {
  return PdpFromIce(Ice(f, data, feature, grid_size));
}

PdpCurve Pdp(const Model& model, const FeatureMatrix& data, int feature,
             int grid_size) {
  return PdpFromIce(Ice(model, data, feature, grid_size));
}

int FeatureRanking::RankOf(const std::string& name) const {
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (scores[i].name == name) return static_cast<int>(i);
  }
  return -1;
}

std::vector<Eigen::Index> SampleRowIndices(Eigen::Index rows, std::size_t count,
                                           std::uint64_t seed) {
  std::vector<Eigen::Index> order(static_cast<std::size_t>(rows));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  if (count >= order.size()) return order;
  Rng rng(MixSeed(seed, 0));
  rng.Shuffle(order);
  order.resize(count);
  std::sort(order.begin(), order.end());
  return order;
}

FeatureMatrix SampleRows(const FeatureMatrix& data, std::size_t count,
                         std::uint64_t seed) {
  const auto idx = SampleRowIndices(data.rows(), count, seed);
  FeatureMatrix out(static_cast<Eigen::Index>(idx.size()), data.cols());
  for (std::size_t i = 0; i < idx.size(); ++i) {
    out.row(static_cast<Eigen::Index>(i)) = data.row(idx[i]);
  }
  return out;
}

FeatureRanking RankFromShap(const std::vector<ShapValues>& shap,
                            const std::vector<std::string>& names) {
  if (shap.empty()) Throw(ErrorKind::kValidation, "rank_features: empty dataset");
  const auto m = static_cast<Eigen::Index>(names.size());
  Eigen::VectorXd total = Eigen::VectorXd::Zero(m);
  for (const ShapValues& s : shap) {
    if (s.phi.size() != m) {
      Throw(ErrorKind::kValidation, "rank_features: name count mismatch");
    }
    total += s.phi.cwiseAbs();
  }
  FeatureRanking ranking;
  for (Eigen::Index j = 0; j < m; ++j) {
    ranking.scores.push_back({names[static_cast<std::size_t>(j)],
                              static_cast<int>(j),
                              total[j] / static_cast<double>(shap.size())});
  }
  std::stable_sort(ranking.scores.begin(), ranking.scores.end(),
                   [](const FeatureScore& a, const FeatureScore& b) {
                     if (a.mean_abs_shap != b.mean_abs_shap) {
                       return a.mean_abs_shap > b.mean_abs_shap;
                     }
                     return a.name < b.name;
                   });
  return ranking;
}

FeatureRanking RankFeatures(const Model& model, const FeatureMatrix& data,
                            const FeatureMatrix& background,
                            const std::vector<std::string>& names,
                            std::size_t max_rows, std::uint64_t seed) {
  if (data.rows() == 0) {
    Throw(ErrorKind::kValidation, "rank_features: empty dataset");
  }
  const FeatureMatrix rows = SampleRows(data, max_rows, seed);
  return RankFromShap(ShapRows(model, rows, background), names);
}

}  // namespace xnet
