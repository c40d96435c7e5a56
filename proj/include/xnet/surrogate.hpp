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

// Surrogate regressors: least squares, ridge, CART, random forest and
// second-order gradient boosting, plus fidelity scoring and model selection.

#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "xnet/datakit.hpp"

namespace xnet {

struct LinearModel {
  Eigen::VectorXd coef;
  double intercept = 0.0;
  double lambda = 0.0;

  double Predict(std::span<const double> x) const;
};

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;
  int count = 0;

  bool is_leaf() const { return feature < 0; }
};

/// Flat binary tree; node 0 is the root. Rows with x[feature] <= threshold go
/// left.
struct RegressionTree {
  std::vector<TreeNode> nodes;
  int max_depth = -1;  // -1: unlimited
  int min_leaf = 1;

  double Predict(std::span<const double> x) const;
  /// Index of the leaf reached by x.
  int Leaf(std::span<const double> x) const;
  int depth() const;
};

enum class EnsembleKind { kForest, kBoosted };

/// Forest: mean of trees. Boosted: base_score + eta * sum of trees.
struct TreeEnsemble {
  EnsembleKind kind = EnsembleKind::kForest;
  std::vector<RegressionTree> trees;
  double eta = 1.0;
  double base_score = 0.0;

  double Predict(std::span<const double> x) const;
};

using Model = std::variant<LinearModel, RegressionTree, TreeEnsemble>;

double Predict(const Model& model, std::span<const double> x);

template <typename Derived>
double Predict(const Model& model, const Eigen::DenseBase<Derived>& x) {
  const Eigen::VectorXd v = x.derived().template cast<double>().transpose();
  return Predict(model, std::span<const double>(v.data(), v.size()));
}

Eigen::VectorXd PredictRows(const Model& model, const FeatureMatrix& x);

// ---------------------------------------------------------------------------
// Fitting
// ---------------------------------------------------------------------------

/// Ordinary least squares with intercept via column-pivoting QR. Throws
/// Error(kValidation) naming the offending columns when rank deficient.
LinearModel FitLinear(const FeatureMatrix& x, const Eigen::VectorXd& y);

/// Minimizes SSres + lambda |coef|^2 with an unpenalized intercept.
LinearModel FitRidge(const FeatureMatrix& x, const Eigen::VectorXd& y,
                     double lambda);

struct TreeParams {
  int max_depth = 6;  // -1: unlimited
  int min_leaf = 1;
};

/// Greedy variance-reduction CART over exact split candidates.
RegressionTree FitTree(const FeatureMatrix& x, const Eigen::VectorXd& y,
                       const TreeParams& params);

struct ForestParams {
  int n_trees = 100;
  int max_depth = -1;
  int min_leaf = 1;
  /// Share of features tried per split; <= 0 selects floor(sqrt(M)).
  double feature_frac = 0.0;
  bool bootstrap = true;
  std::uint64_t seed = 0;
};

TreeEnsemble FitForest(const FeatureMatrix& x, const Eigen::VectorXd& y,
                       const ForestParams& params);

struct BoostParams {
  int n_rounds = 200;
  double eta = 0.1;
  int max_depth = 8;
  double lambda = 1.0;
  int min_leaf = 5;
};

/// Squared-loss boosting with second-order leaf weights -G / (H + lambda).
/// `train_mse`, when given, receives the training MSE before the first round
/// and after each round (n_rounds + 1 values).
TreeEnsemble FitGbt(const FeatureMatrix& x, const Eigen::VectorXd& y,
                    const BoostParams& params,
                    std::vector<double>* train_mse = nullptr);

// ---------------------------------------------------------------------------
// Fidelity and selection
// ---------------------------------------------------------------------------

struct Fidelity {
  double r2 = 0.0;
  double mse = 0.0;
  Eigen::Index n_test = 0;
};

/// R^2 = 1 - SSres / SStot over the given targets. A constant target gives
/// r2 = 1 for a perfect fit and 0 otherwise.
template <typename DerivedY, typename DerivedP>
Fidelity ScoreFidelity(const Eigen::MatrixBase<DerivedY>& y,
                       const Eigen::MatrixBase<DerivedP>& predicted) {
  Fidelity f;
  f.n_test = y.size();
  if (f.n_test == 0) return f;
  const double ss_res = (y - predicted).squaredNorm();
  const double ss_tot = (y.array() - y.mean()).matrix().squaredNorm();
  f.mse = ss_res / static_cast<double>(f.n_test);
  if (ss_tot > 0.0) {
    f.r2 = 1.0 - ss_res / ss_tot;
  } else {
    f.r2 = ss_res == 0.0 ? 1.0 : 0.0;
  }
  return f;
}

Fidelity ComputeFidelity(const Model& model, const Dataset& test);

/// Index of the best candidate: max r2, then min mse, then earliest.
std::size_t SelectBest(const std::vector<Fidelity>& fidelities);

// ---------------------------------------------------------------------------
// Named surrogates and serialization
// ---------------------------------------------------------------------------

struct Surrogate {
  std::string name;  // linear | ridge | tree | forest | boosted
  Model model;
  nlohmann::json hyperparameters = nlohmann::json::object();
  nlohmann::json metadata = nlohmann::json::object();
};

nlohmann::json ToJson(const Surrogate& surrogate);
Surrogate SurrogateFromJson(const nlohmann::json& j);

}  // namespace xnet
