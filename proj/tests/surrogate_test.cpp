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

#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "xnet/surrogate.hpp"

namespace xnet {
namespace {

FeatureMatrix RandomMatrix(int rows, int cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  FeatureMatrix x(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) x(i, j) = u(rng);
  }
  return x;
}

TEST(Linear, RecoversNoiselessCoefficients) {
  const FeatureMatrix x = RandomMatrix(60, 5, 1);
  Eigen::VectorXd beta(5);
  beta << 1.5, -2.0, 0.0, 3.25, 0.5;
  const Eigen::VectorXd y = (x * beta).array() + 0.75;
  const LinearModel m = FitLinear(x, y);
  EXPECT_LT((m.coef - beta).cwiseAbs().maxCoeff(), 1e-9);
  EXPECT_NEAR(m.intercept, 0.75, 1e-9);
}

TEST(Linear, RidgeZeroEqualsOlsAndMatchesNormalEquations) {
  const FeatureMatrix x = RandomMatrix(40, 4, 2);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::VectorXd y(40);
  for (int i = 0; i < 40; ++i) y[i] = x(i, 0) - x(i, 2) + n(rng);
  const LinearModel ols = FitLinear(x, y);
  const LinearModel r0 = FitRidge(x, y, 0.0);
  EXPECT_LT((ols.coef - r0.coef).cwiseAbs().maxCoeff(), 1e-9);
  EXPECT_NEAR(ols.intercept, r0.intercept, 1e-9);

  // Oracle: centred normal equations (Xc'Xc + lambda I) b = Xc'yc.
  const double lambda = 2.5;
  const Eigen::MatrixXd xd = x;
  const Eigen::RowVectorXd mu = xd.colwise().mean();
  const Eigen::MatrixXd xc = xd.rowwise() - mu;
  const Eigen::VectorXd yc = y.array() - y.mean();
  const Eigen::VectorXd b =
      (xc.transpose() * xc + lambda * Eigen::MatrixXd::Identity(4, 4)).ldlt().solve(
          xc.transpose() * yc);
  const LinearModel r = FitRidge(x, y, lambda);
  EXPECT_LT((r.coef - b).cwiseAbs().maxCoeff(), 1e-9);
  EXPECT_NEAR(r.intercept, y.mean() - mu.dot(b), 1e-9);
}

TEST(Linear, RankDeficientDesignIsRejected) {
  FeatureMatrix x = RandomMatrix(20, 3, 4);
  x.col(2) = 2.0 * x.col(0);
  const Eigen::VectorXd y = x.col(1);
  EXPECT_THROW(FitLinear(x, y), Error);
  EXPECT_NO_THROW(FitRidge(x, y, 1.0));
}

TEST(Tree, SplitOnStepFixtureIsBruteForceOptimal) {
  FeatureMatrix x(4, 1);
  x << 0, 1, 2, 3;
  Eigen::VectorXd y(4);
  y << 0, 0, 10, 10;
  const RegressionTree t = FitTree(x, y, {1, 1});
  const oracle::Split best = oracle::BruteForceSplit(x, y);
  ASSERT_FALSE(t.nodes[0].is_leaf());
  EXPECT_EQ(t.nodes[0].feature, best.feature);
  EXPECT_EQ(t.nodes[0].threshold, best.threshold);
  EXPECT_EQ(t.nodes[0].threshold, 1.5);
  EXPECT_EQ(t.Predict(std::vector<double>{0.4}), 0.0);
  EXPECT_EQ(t.Predict(std::vector<double>{2.6}), 10.0);
}

TEST(Tree, RootSplitMatchesBruteForceOnRandomData) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const FeatureMatrix x = RandomMatrix(25, 3, 10 + seed);
    Eigen::VectorXd y(25);
    for (int i = 0; i < 25; ++i) y[i] = std::sin(3 * x(i, seed % 3)) + 0.1 * x(i, 0);
    const RegressionTree t = FitTree(x, y, {1, 2});
    const oracle::Split best = oracle::BruteForceSplit(x, y, 2);
    ASSERT_FALSE(t.nodes[0].is_leaf());
    EXPECT_EQ(t.nodes[0].feature, best.feature);
    EXPECT_NEAR(t.nodes[0].threshold, best.threshold, 1e-12);
  }
}

TEST(Tree, ConstantTargetIsASingleLeaf) {
  const FeatureMatrix x = RandomMatrix(10, 2, 5);
  const RegressionTree t = FitTree(x, Eigen::VectorXd::Constant(10, 3.0), {6, 1});
  EXPECT_EQ(t.nodes.size(), 1u);
  EXPECT_EQ(t.nodes[0].value, 3.0);
}

TEST(Tree, DepthAndLeafSizeLimits) {
  const FeatureMatrix x = RandomMatrix(200, 3, 6);
  Eigen::VectorXd y = x.col(0).array().square() + x.col(1).array();
  const RegressionTree t = FitTree(x, y, {3, 10});
  EXPECT_LE(t.depth(), 3);
  for (const TreeNode& n : t.nodes) {
    if (n.is_leaf()) EXPECT_GE(n.count, 10);
  }
}

TEST(Boosting, TrainingMseIsMonotone) {
  const FeatureMatrix x = RandomMatrix(300, 4, 7);
  Eigen::VectorXd y(300);
  for (int i = 0; i < 300; ++i) y[i] = std::sin(2 * x(i, 0)) * x(i, 1) + x(i, 2);
  std::vector<double> mse;
  BoostParams p;
  p.max_depth = 3;
  const TreeEnsemble m = FitGbt(x, y, p, &mse);
  ASSERT_EQ(mse.size(), 201u);
  for (std::size_t i = 1; i < mse.size(); ++i) EXPECT_LE(mse[i], mse[i - 1]);
  EXPECT_LT(mse.back(), 0.1 * mse.front());
  EXPECT_NEAR(ScoreFidelity(y, PredictRows(m, x)).mse, mse.back(), 1e-12);
}

TEST(Forest, SeededAndAveraging) {
  const FeatureMatrix x = RandomMatrix(80, 3, 8);
  const Eigen::VectorXd y = x.col(0) * 2.0;
  ForestParams p;
  p.n_trees = 15;
  p.seed = 9;
  const TreeEnsemble a = FitForest(x, y, p);
  const TreeEnsemble b = FitForest(x, y, p);
  EXPECT_EQ(PredictRows(a, x), PredictRows(b, x));
  const std::vector<double> q{0.2, -0.1, 0.5};
  double mean = 0.0;
  for (const auto& t : a.trees) mean += t.Predict(q);
  EXPECT_NEAR(a.Predict(q), mean / 15.0, 1e-12);
  p.seed = 10;
  EXPECT_NE(PredictRows(FitForest(x, y, p), x), PredictRows(a, x));
}

TEST(Fidelity, HandValuesAndSelection) {
  Eigen::VectorXd y(4), p(4);
  y << 1, 2, 3, 4;
  p << 1, 2, 3, 5;
  const Fidelity f = ScoreFidelity(y, p);
  EXPECT_DOUBLE_EQ(f.mse, 0.25);
  EXPECT_DOUBLE_EQ(f.r2, 1.0 - 1.0 / 5.0);
  EXPECT_EQ(ScoreFidelity(Eigen::VectorXd::Ones(3), Eigen::VectorXd::Ones(3)).r2, 1.0);
  EXPECT_EQ(SelectBest({{0.5, 1.0, 4}, {0.9, 2.0, 4}, {0.9, 1.0, 4}, {0.9, 1.0, 4}}), 2u);
  EXPECT_THROW(SelectBest({}), Error);
}

TEST(Serialization, ModelsRoundTrip) {
  const FeatureMatrix x = RandomMatrix(50, 3, 11);
  const Eigen::VectorXd y = x.col(0).array().abs() + x.col(1).array();
  ForestParams fp;
  fp.n_trees = 5;
  BoostParams bp;
  bp.n_rounds = 10;
  const std::vector<Surrogate> models = {
      {"linear", FitLinear(x, y)},
      {"tree", FitTree(x, y, {4, 1})},
      {"forest", FitForest(x, y, fp)},
      {"boosted", FitGbt(x, y, bp)}};
  for (const Surrogate& s : models) {
    const nlohmann::json j = ToJson(s);
    const Surrogate r = SurrogateFromJson(nlohmann::json::parse(j.dump()));
    EXPECT_EQ(r.name, s.name);
    EXPECT_EQ(PredictRows(r.model, x), PredictRows(s.model, x));
    EXPECT_EQ(ToJson(r).dump(), j.dump());
  }
  EXPECT_THROW(SurrogateFromJson(nlohmann::json{{"schema_version", 99}}), Error);
}

}  // namespace
}  // namespace xnet
