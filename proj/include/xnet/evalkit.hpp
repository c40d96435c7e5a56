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

// Routing performance metrics per traffic matrix, report comparison and
// report files.

#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "xnet/common.hpp"
#include "xnet/flowsim.hpp"
#include "xnet/netcore.hpp"

namespace xnet {

inline constexpr int kReportSchemaVersion = 1;

/// Link average plus whether it fell back to the idle rule.
struct LinkAverage {
  double value = 0.0;
  bool idle = false;
};

/// Mean over ordered pairs of route hops / shortest hops.
double MeanStretch(const RouteSet& routes, const Topology& topology);

/// Mean delay of loaded links; all links when none is loaded (flagged).
LinkAverage MeanLinkDelay(const LinkMetrics& metrics);
/// Mean of min(load, capacity) over loaded links; 0 when idle (flagged).
LinkAverage MeanLinkThroughput(const LinkMetrics& metrics);
/// Mean loss over loaded links; 0 when idle (flagged).
LinkAverage MeanLinkLoss(const LinkMetrics& metrics);

enum Metric : int { kStretch = 0, kMeanDelay, kThroughput, kLoss };
inline constexpr int kNumMetrics = 4;
inline constexpr std::string_view kMetricColumns[kNumMetrics] = {
    "mean_stretch", "mean_delay_ms", "mean_throughput_mbps", "mean_loss"};
inline constexpr bool HigherIsBetter(Metric m) { return m == kThroughput; }

struct TmMetrics {
  std::string tag;
  std::array<double, kNumMetrics> values{};
  bool idle = false;               // no loaded link
  bool extraction_failed = false;  // worst-case values substituted

  double operator[](Metric m) const { return values[m]; }
  bool operator==(const TmMetrics&) const = default;
};

TmMetrics EvaluateTm(const std::string& tag, const Topology& topology,
                     const RouteSet& routes, const LinkMetrics& metrics);

/// Values charged to a traffic matrix whose routes could not be extracted:
/// longest simple-path stretch, saturated delay on the slowest link, zero
/// throughput and near-total loss.
TmMetrics WorstCaseTm(const std::string& tag, const Topology& topology);

struct EvalReport {
  std::string name;
  std::vector<TmMetrics> per_tm;
  /// Weights, seeds, hyperparameters.
  nlohmann::json metadata = nlohmann::json::object();

  /// Mean over traffic matrices for each metric.
  std::array<double, kNumMetrics> Overall() const;
  bool operator==(const EvalReport& o) const {
    return name == o.name && per_tm == o.per_tm && metadata == o.metadata;
  }
};

struct Comparison {
  std::string base;
  std::string other;
  std::vector<std::string> tags;
  /// (other - base) / base per metric and TM; NaN when base is zero and
  /// other is not.
  std::array<std::vector<double>, kNumMetrics> relative;
  std::array<double, kNumMetrics> overall_relative{};
  /// TMs where `other` is strictly better than `base`.
  std::array<int, kNumMetrics> wins{};
};

/// Signed relative differences over the TMs both reports share, matched by
/// tag in `a`'s order.
Comparison Compare(const EvalReport& a, const EvalReport& b);

nlohmann::json ToJson(const EvalReport& report);
EvalReport ReportFromJson(const nlohmann::json& j);
nlohmann::json ToJson(const Comparison& comparison);

/// `tm_tag,mean_stretch,mean_delay_ms,mean_throughput_mbps,mean_loss`
std::string ReportCsv(const EvalReport& report);

/// Writes `reports.json`, `<name>.csv` per report and one
/// `panel_<metric>.csv` per metric with a column per report.
void EmitReports(const std::vector<EvalReport>& reports,
                 const std::filesystem::path& dir);
std::vector<EvalReport> ReadReports(const std::filesystem::path& dir);

}  // namespace xnet
