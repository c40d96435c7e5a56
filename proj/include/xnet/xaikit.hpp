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

// Model explanations: exact interventional Shapley values, SHAP dependence,
// partial dependence, ICE curves and the mean-|SHAP| feature ranking.
//
// Coalition values are indexed by bitmask: bit j set means feature j is taken
// from the explained instance, otherwise from the background row.

#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "xnet/datakit.hpp"
#include "xnet/surrogate.hpp"

namespace xnet {

using Predictor = std::function<double(std::span<const double>)>;

/// Subset enumeration costs 2^M model calls per background row.
inline constexpr int kMaxShapFeatures = 15;

struct ShapValues {
  Eigen::VectorXd phi;
  double base = 0.0;  // v(empty coalition)
};

/// v(S) for every coalition S: mean over background rows of the model at the
/// hybrid point.
std::vector<double> CoalitionValues(const Predictor& f,
                                    std::span<const double> instance,
                                    const FeatureMatrix& background);

/// Same values; tree models take a single pass per (tree, background row).
std::vector<double> CoalitionValues(const Model& model,
                                    std::span<const double> instance,
                                    const FeatureMatrix& background);

/// Shapley-kernel combination of coalition values over m features.
ShapValues ShapFromCoalitions(const std::vector<double>& values, int m);

ShapValues ShapExact(const Predictor& f, std::span<const double> instance,
                     const FeatureMatrix& background);
ShapValues ShapExact(const Model& model, std::span<const double> instance,
                     const FeatureMatrix& background);

/// Attributions for every row of `rows` (parallel over rows).
std::vector<ShapValues> ShapRows(const Model& model, const FeatureMatrix& rows,
                                 const FeatureMatrix& background);

/// (feature value, phi) for each row.
std::vector<std::pair<double, double>> ShapDependence(
    const std::vector<ShapValues>& shap, const FeatureMatrix& rows,
    int feature);
std::vector<std::pair<double, double>> ShapDependence(
    const Model& model, const FeatureMatrix& rows, int feature,
    const FeatureMatrix& background);

struct IceCurves {
  int feature = 0;
  Eigen::VectorXd grid;
  Eigen::MatrixXd predictions;  // rows x grid
};

struct PdpCurve {
  int feature = 0;
  Eigen::VectorXd grid;
  Eigen::VectorXd mean;
};

/// Quantiles of the column at evenly spaced levels, deduplicated ascending.
Eigen::VectorXd QuantileGrid(const FeatureMatrix& data, int feature,
                             int grid_size);

IceCurves Ice(const Predictor& f, const FeatureMatrix& data, int feature,
              int grid_size = 20);
IceCurves Ice(const Model& model, const FeatureMatrix& data, int feature,
              int grid_size = 20);

/// Column means of the ICE matrix.
PdpCurve PdpFromIce(const IceCurves& ice);
PdpCurve Pdp(const Predictor& f, const FeatureMatrix& data, int feature,
             int grid_size = 20);
PdpCurve Pdp(const Model& model, const FeatureMatrix& data, int feature,
             int grid_size = 20);

struct FeatureScore {
  std::string name;
  int index = 0;
  double mean_abs_shap = 0.0;
};

struct FeatureRanking {
  std::vector<FeatureScore> scores;  // descending

  /// Position of a feature in the ranking, or -1.
  int RankOf(const std::string& name) const;
};

/// Seeded sample of row indices without replacement, ascending; all rows when
/// `count` >= rows.
std::vector<Eigen::Index> SampleRowIndices(Eigen::Index rows, std::size_t count,
                                           std::uint64_t seed);

/// Rows at SampleRowIndices(data.rows(), count, seed).
FeatureMatrix SampleRows(const FeatureMatrix& data, std::size_t count,
                         std::uint64_t seed);

/// Orders features by mean |phi| (ties by name).
FeatureRanking RankFromShap(const std::vector<ShapValues>& shap,
                            const std::vector<std::string>& names);

/// Mean |phi| over a seeded subsample of at most `max_rows` rows.
FeatureRanking RankFeatures(const Model& model, const FeatureMatrix& data,
                            const FeatureMatrix& background,
                            const std::vector<std::string>& names,
                            std::size_t max_rows = 2000,
                            std::uint64_t seed = 0);

}  // namespace xnet
