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

// Surrogate training data: samples pulled from Q-tables, cleaned, encoded and
// persisted as CSV plus a JSON sidecar.

#pragma once

#include <Eigen/Dense>

#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "xnet/flowsim.hpp"
#include "xnet/netcore.hpp"
#include "xnet/qrouter.hpp"

namespace xnet {

/// Row-major so a sample's features are contiguous.
using FeatureMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline constexpr int kNumFeatures = 5;
inline constexpr const char* kFeatureNames[kNumFeatures] = {
    "src_enc", "dst_enc", "bwd_hat", "delay_hat", "pkloss_hat"};

/// One Q-table entry. Numeric fields may be NaN to mark a missing cell.
struct RawSample {
  std::string src;
  std::string dst;
  double bwd_hat = 0.0;
  double delay_hat = 0.0;
  double pkloss_hat = 0.0;
  double qvalue = 0.0;
};

/// Cell-wise equality where NaN equals NaN.
bool SameSample(const RawSample& a, const RawSample& b);

struct TargetEncoder {
  double smoothing = 10.0;
  double prior = 0.0;
  /// category -> (count, mean target, encoding)
  struct Entry {
    std::size_t count = 0;
    double mean = 0.0;
    double encoding = 0.0;
  };
  std::map<std::string, Entry> table;

  /// Smoothed mean, or the prior for unseen categories.
  double Encode(const std::string& category) const;
};

struct IqrBand {
  double q1 = 0.0;
  double q3 = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  double k = 1.5;
};

struct Dataset {
  std::vector<std::string> src;
  std::vector<std::string> dst;
  FeatureMatrix features;  // rows x kNumFeatures, kFeatureNames order
  Eigen::VectorXd target;

  TargetEncoder src_encoder;
  TargetEncoder dst_encoder;
  IqrBand band;
  /// Free-form provenance (TM tags, seeds, hyperparameters).
  nlohmann::json provenance = nlohmann::json::object();

  Eigen::Index rows() const { return target.size(); }
  /// Row subset in the given order; metadata is carried over.
  Dataset Subset(const std::vector<Eigen::Index>& rows) const;
  std::vector<RawSample> ToRawSamples() const;
};

/// One sample per (dst, state, action) table entry.
std::vector<RawSample> ExtractSamples(const Topology& topology,
                                      const QTables& tables,
                                      const NormalizedMetrics& metrics);

/// Drops repeated rows, keeping first occurrences in order.
std::vector<RawSample> Dedupe(const std::vector<RawSample>& rows);

/// Replaces missing numeric cells with the column median. Throws
/// Error(kValidation) when a whole column is missing.
std::vector<RawSample> Impute(const std::vector<RawSample>& rows);

/// Quantile with linear interpolation between closest ranks (p in [0,1]).
double Quantile(std::vector<double> values, double p);

/// Winsorizes to [Q1 - k IQR, Q3 + k IQR].
std::pair<Eigen::VectorXd, IqrBand> IqrClip(const Eigen::VectorXd& targets,
                                            double k = 1.5);

TargetEncoder FitTargetEncoder(const std::vector<std::string>& categories,
                               const Eigen::VectorXd& targets,
                               double smoothing = 10.0);

/// dedupe -> impute -> IQR clip -> dedupe -> target encode.
Dataset Preprocess(const std::vector<RawSample>& raw);

/// Seeded shuffle; the test part holds round(rows * test_frac) rows.
std::pair<Dataset, Dataset> Split(const Dataset& data, double test_frac,
                                  std::uint64_t seed);

std::string WriteDatasetCsv(const Dataset& data);
nlohmann::json DatasetMetadata(const Dataset& data);

/// Writes `path` and the sidecar `SidecarPath(path)`.
void WriteDataset(const Dataset& data, const std::filesystem::path& path);
Dataset ReadDataset(const std::filesystem::path& path);
Dataset ParseDataset(std::string_view csv, const nlohmann::json& metadata);

/// dataset.csv -> dataset.meta.json
std::filesystem::path SidecarPath(const std::filesystem::path& csv_path);

}  // namespace xnet
