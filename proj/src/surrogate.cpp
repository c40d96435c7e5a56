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

#include "xnet/surrogate.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numeric>

namespace xnet {

double LinearModel::Predict(std::span<const double> x) const {
  double out = intercept;
  for (Eigen::Index i = 0; i < coef.size(); ++i) out += coef[i] * x[i];
  return out;
}

int RegressionTree::Leaf(std::span<const double> x) const {
  int n = 0;
  while (!nodes[n].is_leaf()) {
    const TreeNode& node = nodes[n];
    n = x[node.feature] <= node.threshold ? node.left : node.right;
  }
  return n;
}

double RegressionTree::Predict(std::span<const double> x) const {
  return nodes[Leaf(x)].value;
}

int RegressionTree::depth() const {
  std::vector<int> d(nodes.size(), 0);
  int deepest = 0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i].is_leaf()) continue;
    d[nodes[i].left] = d[i] + 1;
    d[nodes[i].right] = d[i] + 1;
    deepest = std::max(deepest, d[i] + 1);
  }
  return deepest;
}

double TreeEnsemble::Predict(std::span<const double> x) const {
  double sum = 0.0;
  for (const RegressionTree& t : trees) sum += t.Predict(x);
  if (kind == EnsembleKind::kForest) {
    return trees.empty() ? base_score : sum / static_cast<double>(trees.size());
  }
  return base_score + eta * sum;
}

double Predict(const Model& model, std::span<const double> x) {
  return std::visit([&](const auto& m) { return m.Predict(x); }, model);
}

Eigen::VectorXd PredictRows(const Model& model, const FeatureMatrix& x) {
  Eigen::VectorXd out(x.rows());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    out[i] = Predict(model, std::span<const double>(x.row(i).data(), x.cols()));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Linear models
// ---------------------------------------------------------------------------

namespace {

void CheckShapes(const FeatureMatrix& x, const Eigen::VectorXd& y) {
  if (x.rows() != y.size()) {
    Throw(ErrorKind::kValidation, "feature/target row count mismatch");
  }
  if (x.rows() < 2) Throw(ErrorKind::kValidation, "need at least 2 rows");
}

[[noreturn]] void RankError(const FeatureMatrix& x,
                            const Eigen::ColPivHouseholderQR<Eigen::MatrixXd>& qr,
                            bool with_intercept) {
  std::vector<Eigen::Index> offending;
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    if (x.col(c).maxCoeff() == x.col(c).minCoeff()) offending.push_back(c);
  }
  if (offending.empty()) {
    const auto& perm = qr.colsPermutation().indices();
    for (Eigen::Index k = qr.rank(); k < perm.size(); ++k) {
      const Eigen::Index c = perm[k] - (with_intercept ? 1 : 0);
      if (c >= 0) offending.push_back(c);
    }
    std::sort(offending.begin(), offending.end());
  }
  std::string cols;
  for (Eigen::Index c : offending) {
    cols += (cols.empty() ? "" : ",") + std::to_string(c);
  }
  Throw(ErrorKind::kValidation,
        "rank-deficient design matrix (rank " + std::to_string(qr.rank()) +
            "); offending feature columns: [" + cols + "]");
}

}  // namespace

LinearModel FitLinear(const FeatureMatrix& x, const Eigen::VectorXd& y) {
  CheckShapes(x, y);
  Eigen::MatrixXd design(x.rows(), x.cols() + 1);
  design.col(0).setOnes();
  design.rightCols(x.cols()) = x;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  if (qr.rank() < design.cols()) RankError(x, qr, true);
  const Eigen::VectorXd beta = qr.solve(y);
  LinearModel m;
  m.intercept = beta[0];
  m.coef = beta.tail(x.cols());
  return m;
}

LinearModel FitRidge(const FeatureMatrix& x, const Eigen::VectorXd& y,
                     double lambda) {
  CheckShapes(x, y);
  if (!(lambda >= 0.0)) Throw(ErrorKind::kValidation, "ridge: lambda < 0");
  const Eigen::RowVectorXd mean = x.colwise().mean();
  const double y_mean = y.mean();
  const Eigen::Index n = x.rows();
  const Eigen::Index p = x.cols();
  // Centred augmented system [Xc; sqrt(lambda) I] b = [yc; 0].
  Eigen::MatrixXd a(n + p, p);
  a.topRows(n) = x.rowwise() - mean;
  a.bottomRows(p) = std::sqrt(lambda) * Eigen::MatrixXd::Identity(p, p);
  Eigen::VectorXd b(n + p);
  b.head(n) = y.array() - y_mean;
  b.tail(p).setZero();
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
  if (qr.rank() < p) RankError(x, qr, false);
  LinearModel m;
  m.coef = qr.solve(b);
  m.intercept = y_mean - mean.dot(m.coef);
  m.lambda = lambda;
  return m;
}

// ---------------------------------------------------------------------------
// Tree growing
// ---------------------------------------------------------------------------

namespace {

constexpr double kRelativeGainTolerance = 1e-12;

// Grows one tree over a sample (row ids, possibly repeated) with per-sample
// gradient statistics. CART uses g = y, h = 1, lambda = 0 and mean leaves;
// boosting uses g = pred - y, h = 1 and weights -G / (H + lambda).
class TreeGrower {
 public:
  struct Options {
    int max_depth = -1;
    int min_leaf = 1;
    double lambda = 0.0;
    bool newton_leaves = false;
    int features_per_split = 0;  // 0: all
    Rng* rng = nullptr;
  };

  TreeGrower(const FeatureMatrix& x, std::vector<Eigen::Index> rows,
             std::vector<double> g, std::vector<double> h, Options options)
      : x_(x),
        rows_(std::move(rows)),
        g_(std::move(g)),
        h_(std::move(h)),
        opt_(options),
        goes_left_(rows_.size(), 0) {}

  RegressionTree Grow() {
    const int num_features = static_cast<int>(x_.cols());
    std::vector<std::vector<int>> sorted(num_features);
    for (int f = 0; f < num_features; ++f) {
      auto& order = sorted[f];
      order.resize(rows_.size());
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return x_(rows_[a], f) < x_(rows_[b], f);
      });
    }
    tree_.max_depth = opt_.max_depth;
    tree_.min_leaf = opt_.min_leaf;
    tree_.nodes.clear();
    Build(std::move(sorted), 0);
    return std::move(tree_);
  }

 private:
  struct Split {
    int feature = -1;
    double threshold = 0.0;
    double gain = 0.0;
  };

  double Score(double g, double h) const { return g * g / (h + opt_.lambda); }

  int Build(std::vector<std::vector<int>> sorted, int depth) {
    const auto& any = sorted.front();
    const int n = static_cast<int>(any.size());
    double g_sum = 0.0, h_sum = 0.0;
    for (int k : any) {
      g_sum += g_[k];
      h_sum += h_[k];
    }
    const int id = static_cast<int>(tree_.nodes.size());
    tree_.nodes.emplace_back();
    tree_.nodes[id].count = n;
    tree_.nodes[id].value =
        opt_.newton_leaves ? -g_sum / (h_sum + opt_.lambda) : g_sum / h_sum;

    const bool depth_ok = opt_.max_depth < 0 || depth < opt_.max_depth;
    if (!depth_ok || n < 2 * opt_.min_leaf) return id;

    // CART gains are shift invariant; centring keeps a constant target at an
    // exact zero gain.
    const double shift = opt_.newton_leaves ? 0.0 : g_sum / h_sum;
    const Split best = FindSplit(sorted, shift, g_sum - shift * h_sum, h_sum);
    if (best.feature < 0) return id;

    for (int k : sorted[best.feature]) {
      goes_left_[k] = x_(rows_[k], best.feature) <= best.threshold;
    }
    std::vector<std::vector<int>> left(sorted.size()), right(sorted.size());
    for (std::size_t f = 0; f < sorted.size(); ++f) {
      for (int k : sorted[f]) (goes_left_[k] ? left[f] : right[f]).push_back(k);
      std::vector<int>().swap(sorted[f]);
    }
    const int l = Build(std::move(left), depth + 1);
    const int r = Build(std::move(right), depth + 1);
    TreeNode& node = tree_.nodes[id];
    node.feature = best.feature;
    node.threshold = best.threshold;
    node.left = l;
    node.right = r;
    return id;
  }

  std::vector<int> CandidateFeatures() {
    const int m = static_cast<int>(x_.cols());
    std::vector<int> features(m);
    std::iota(features.begin(), features.end(), 0);
    const int k = opt_.features_per_split;
    if (k <= 0 || k >= m || opt_.rng == nullptr) return features;
    for (int i = 0; i < k; ++i) {
      const auto j = i + static_cast<int>(opt_.rng->Index(m - i));
      std::swap(features[i], features[j]);
    }
    features.resize(k);
    std::sort(features.begin(), features.end());
    return features;
  }

  Split FindSplit(const std::vector<std::vector<int>>& sorted, double shift,
                  double g_total, double h_total) {
    Split best;
    const double parent = Score(g_total, h_total);
    for (int f : CandidateFeatures()) {
      const auto& order = sorted[f];
      const int n = static_cast<int>(order.size());
      double gl = 0.0, hl = 0.0;
      for (int i = 0; i + 1 < n; ++i) {
        const int k = order[i];
        gl += g_[k] - shift * h_[k];
        hl += h_[k];
        const double xi = x_(rows_[k], f);
        const double xn = x_(rows_[order[i + 1]], f);
        if (!(xn > xi)) continue;
        if (i + 1 < opt_.min_leaf || n - i - 1 < opt_.min_leaf) continue;
        const double sl = Score(gl, hl);
        const double sr = Score(g_total - gl, h_total - hl);
        const double gain = sl + sr - parent;
        const double tol = kRelativeGainTolerance * (sl + sr + parent);
        if (gain > tol && gain > best.gain) {
          double mid = xi + (xn - xi) / 2.0;
          if (!(mid < xn)) mid = xi;
          best = {f, mid, gain};
        }
      }
    }
    return best;
  }

  const FeatureMatrix& x_;
  std::vector<Eigen::Index> rows_;
  std::vector<double> g_;
  std::vector<double> h_;
  Options opt_;
  std::vector<char> goes_left_;
  RegressionTree tree_;
};

std::vector<Eigen::Index> AllRows(Eigen::Index n) {
  std::vector<Eigen::Index> rows(static_cast<std::size_t>(n));
  std::iota(rows.begin(), rows.end(), Eigen::Index{0});
  return rows;
}

}  // namespace

RegressionTree FitTree(const FeatureMatrix& x, const Eigen::VectorXd& y,
                       const TreeParams& params) {
  if (x.rows() != y.size() || x.rows() == 0) {
    Throw(ErrorKind::kValidation, "fit_tree: bad shapes");
  }
  if (params.min_leaf < 1) Throw(ErrorKind::kValidation, "min_leaf must be >= 1");
  std::vector<double> g(y.data(), y.data() + y.size());
  TreeGrower grower(x, AllRows(x.rows()), std::move(g),
                    std::vector<double>(static_cast<std::size_t>(y.size()), 1.0),
                    {params.max_depth, params.min_leaf, 0.0, false, 0, nullptr});
  return grower.Grow();
}

TreeEnsemble FitForest(const FeatureMatrix& x, const Eigen::VectorXd& y,
                       const ForestParams& params) {
  if (x.rows() != y.size() || x.rows() == 0) {
    Throw(ErrorKind::kValidation, "fit_forest: bad shapes");
  }
  if (params.n_trees < 1) Throw(ErrorKind::kValidation, "n_trees must be >= 1");
  const int m = static_cast<int>(x.cols());
  int per_split = params.feature_frac > 0.0
                      ? static_cast<int>(std::lround(params.feature_frac * m))
                      : static_cast<int>(std::floor(std::sqrt(m)));
  per_split = std::clamp(per_split, 1, m);

  TreeEnsemble forest;
  forest.kind = EnsembleKind::kForest;
  forest.trees.resize(static_cast<std::size_t>(params.n_trees));
  ParallelFor(forest.trees.size(), [&](std::size_t t) {
    Rng rng(MixSeed(params.seed, t));
    std::vector<Eigen::Index> rows;
    if (params.bootstrap) {
      rows.resize(static_cast<std::size_t>(x.rows()));
      for (auto& r : rows) {
        r = static_cast<Eigen::Index>(rng.Index(static_cast<std::uint64_t>(x.rows())));
      }
      std::sort(rows.begin(), rows.end());
    } else {
      rows = AllRows(x.rows());
    }
    std::vector<double> g;
    g.reserve(rows.size());
    for (Eigen::Index r : rows) g.push_back(y[r]);
    std::vector<double> h(rows.size(), 1.0);
    TreeGrower grower(x, std::move(rows), std::move(g), std::move(h),
                      {params.max_depth, params.min_leaf, 0.0, false,
                       per_split, &rng});
    forest.trees[t] = grower.Grow();
  });
  return forest;
}

TreeEnsemble FitGbt(const FeatureMatrix& x, const Eigen::VectorXd& y,
                    const BoostParams& params, std::vector<double>* train_mse) {
  if (x.rows() != y.size() || x.rows() == 0) {
    Throw(ErrorKind::kValidation, "fit_gbt: bad shapes");
  }
  if (params.n_rounds < 0 || !(params.eta > 0.0) || !(params.lambda >= 0.0) ||
      params.min_leaf < 1) {
    Throw(ErrorKind::kValidation, "fit_gbt: invalid hyperparameters");
  }
  TreeEnsemble model;
  model.kind = EnsembleKind::kBoosted;
  model.eta = params.eta;
  model.base_score = y.mean();
  if (params.n_rounds == 0) {
    std::cerr << "warning: fit_gbt with n_rounds = 0 yields a base-score-only "
                 "model\n";
  }
  Eigen::VectorXd pred = Eigen::VectorXd::Constant(y.size(), model.base_score);
  if (train_mse) {
    train_mse->clear();
    train_mse->push_back((pred - y).squaredNorm() / static_cast<double>(y.size()));
  }
  const std::vector<Eigen::Index> rows = AllRows(x.rows());
  const std::vector<double> h(rows.size(), 1.0);
  for (int round = 0; round < params.n_rounds; ++round) {
    std::vector<double> g(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      g[i] = pred[static_cast<Eigen::Index>(i)] - y[static_cast<Eigen::Index>(i)];
    }
    TreeGrower grower(x, rows, std::move(g), h,
                      {params.max_depth, params.min_leaf, params.lambda, true, 0,
                       nullptr});
    RegressionTree tree = grower.Grow();
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      pred[i] += params.eta *
                 tree.Predict(std::span<const double>(x.row(i).data(), x.cols()));
    }
    model.trees.push_back(std::move(tree));
    if (train_mse) {
      train_mse->push_back((pred - y).squaredNorm() /
                           static_cast<double>(y.size()));
    }
  }
  return model;
}

Fidelity ComputeFidelity(const Model& model, const Dataset& test) {
  return ScoreFidelity(test.target, PredictRows(model, test.features));
}

std::size_t SelectBest(const std::vector<Fidelity>& fidelities) {
  if (fidelities.empty()) {
    Throw(ErrorKind::kValidation, "select_best: no candidates");
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < fidelities.size(); ++i) {
    const Fidelity& a = fidelities[i];
    const Fidelity& b = fidelities[best];
    if (a.r2 > b.r2 || (a.r2 == b.r2 && a.mse < b.mse)) best = i;
  }
  return best;
}

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------

namespace {

constexpr int kModelSchemaVersion = 1;

nlohmann::json NodeToJson(const RegressionTree& tree, int id) {
  const TreeNode& n = tree.nodes[id];
  if (n.is_leaf()) return {{"value", n.value}, {"count", n.count}};
  return {{"feature", n.feature},
          {"threshold", n.threshold},
          {"count", n.count},
          {"value", n.value},
          {"left", NodeToJson(tree, n.left)},
          {"right", NodeToJson(tree, n.right)}};
}

int NodeFromJson(const nlohmann::json& j, RegressionTree& tree) {
  const int id = static_cast<int>(tree.nodes.size());
  tree.nodes.emplace_back();
  tree.nodes[id].value = j.at("value").get<double>();
  tree.nodes[id].count = j.value("count", 0);
  if (j.contains("feature")) {
    const int feature = j.at("feature").get<int>();
    const double threshold = j.at("threshold").get<double>();
    const int l = NodeFromJson(j.at("left"), tree);
    const int r = NodeFromJson(j.at("right"), tree);
    TreeNode& node = tree.nodes[id];
    node.feature = feature;
    node.threshold = threshold;
    node.left = l;
    node.right = r;
  }
  return id;
}

nlohmann::json TreeToJson(const RegressionTree& tree) {
  return {{"max_depth", tree.max_depth},
          {"min_leaf", tree.min_leaf},
          {"root", NodeToJson(tree, 0)}};
}

RegressionTree TreeFromJson(const nlohmann::json& j) {
  RegressionTree tree;
  tree.max_depth = j.at("max_depth").get<int>();
  tree.min_leaf = j.at("min_leaf").get<int>();
  NodeFromJson(j.at("root"), tree);
  return tree;
}

}  // namespace

nlohmann::json ToJson(const Surrogate& s) {
  nlohmann::json j;
  j["schema_version"] = kModelSchemaVersion;
  j["name"] = s.name;
  j["feature_names"] = nlohmann::json::array();
  for (const char* f : kFeatureNames) j["feature_names"].push_back(f);
  j["hyperparameters"] = s.hyperparameters;
  j["metadata"] = s.metadata;
  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, LinearModel>) {
          j["kind"] = "linear";
          j["intercept"] = m.intercept;
          j["lambda"] = m.lambda;
          j["coefficients"] =
              std::vector<double>(m.coef.data(), m.coef.data() + m.coef.size());
        } else if constexpr (std::is_same_v<T, RegressionTree>) {
          j["kind"] = "tree";
          j["tree"] = TreeToJson(m);
        } else {
          j["kind"] = m.kind == EnsembleKind::kForest ? "forest" : "boosted";
          j["eta"] = m.eta;
          j["base_score"] = m.base_score;
          j["trees"] = nlohmann::json::array();
          for (const auto& t : m.trees) j["trees"].push_back(TreeToJson(t));
        }
      },
      s.model);
  return j;
}

Surrogate SurrogateFromJson(const nlohmann::json& j) {
  try {
    if (j.at("schema_version").get<int>() != kModelSchemaVersion) {
      Throw(ErrorKind::kParse, "model: unsupported schema_version");
    }
    Surrogate s;
    s.name = j.at("name").get<std::string>();
    s.hyperparameters = j.value("hyperparameters", nlohmann::json::object());
    s.metadata = j.value("metadata", nlohmann::json::object());
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "linear") {
      LinearModel m;
      const auto coef = j.at("coefficients").get<std::vector<double>>();
      m.coef = Eigen::Map<const Eigen::VectorXd>(coef.data(),
                                                 static_cast<Eigen::Index>(coef.size()));
      m.intercept = j.at("intercept").get<double>();
      m.lambda = j.at("lambda").get<double>();
      s.model = m;
    } else if (kind == "tree") {
      s.model = TreeFromJson(j.at("tree"));
    } else if (kind == "forest" || kind == "boosted") {
      TreeEnsemble e;
      e.kind = kind == "forest" ? EnsembleKind::kForest : EnsembleKind::kBoosted;
      e.eta = j.at("eta").get<double>();
      e.base_score = j.at("base_score").get<double>();
      for (const auto& t : j.at("trees")) e.trees.push_back(TreeFromJson(t));
      s.model = std::move(e);
    } else {
      Throw(ErrorKind::kParse, "model: unknown kind '" + kind + "'");
    }
    return s;
  } catch (const nlohmann::json::exception& e) {
    Throw(ErrorKind::kParse, std::string("model: ") + e.what());
  }
}

}  // namespace xnet
