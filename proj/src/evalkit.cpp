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

#include "xnet/evalkit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace xnet {
namespace {

template <typename F>
LinkAverage LoadedMean(const LinkMetrics& m, F value, double idle_value,
                       bool idle_uses_all) {
  double sum = 0.0;
  int count = 0;
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    if (m.load[i] > 0.0) {
      sum += value(i);
      ++count;
    }
  }
  if (count > 0) return {sum / count, false};
  if (idle_uses_all && m.size() > 0) {
    for (Eigen::Index i = 0; i < m.size(); ++i) sum += value(i);
    return {sum / static_cast<double>(m.size()), true};
  }
  return {idle_value, true};
}

nlohmann::json NumberOrNull(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

}  // namespace

double MeanStretch(const RouteSet& routes, const Topology& topology) {
  const int n = static_cast<int>(topology.nodes().size());
  if (routes.num_nodes() != n) {
    Throw(ErrorKind::kValidation, "mean_stretch: route set size mismatch");
  }
  if (n < 2) Throw(ErrorKind::kValidation, "mean_stretch: fewer than 2 nodes");
  double sum = 0.0;
  for (NodeIndex d = 0; d < n; ++d) {
    const std::vector<int> dist = HopDistancesTo(topology, d);
    for (NodeIndex s = 0; s < n; ++s) {
      if (s == d) continue;
      const Path& p = routes.at(s, d);
      if (!IsValidPath(topology, p, s, d)) {
        Throw(ErrorKind::kValidation,
              "mean_stretch: no valid route " + topology.name(s) + "->" +
                  topology.name(d));
      }
      sum += static_cast<double>(p.hops()) / dist[s];
    }
  }
  return sum / (static_cast<double>(n) * (n - 1));
}

LinkAverage MeanLinkDelay(const LinkMetrics& m) {
  return LoadedMean(m, [&](Eigen::Index i) { return m.delay[i]; }, 0.0, true);
}

LinkAverage MeanLinkThroughput(const LinkMetrics& m) {
  return LoadedMean(
      m, [&](Eigen::Index i) { return std::min(m.load[i], m.capacity[i]); },
      0.0, false);
}

LinkAverage MeanLinkLoss(const LinkMetrics& m) {
  return LoadedMean(m, [&](Eigen::Index i) { return m.loss[i]; }, 0.0, false);
}

TmMetrics EvaluateTm(const std::string& tag, const Topology& topology,
                     const RouteSet& routes, const LinkMetrics& metrics) {
  TmMetrics t;
  t.tag = tag;
  t.values[kStretch] = MeanStretch(routes, topology);
  const LinkAverage delay = MeanLinkDelay(metrics);
  t.values[kMeanDelay] = delay.value;
  t.values[kThroughput] = MeanLinkThroughput(metrics).value;
  t.values[kLoss] = MeanLinkLoss(metrics).value;
  t.idle = delay.idle;
  return t;
}

TmMetrics WorstCaseTm(const std::string& tag, const Topology& topology) {
  TmMetrics t;
  t.tag = tag;
  t.extraction_failed = true;
  t.values[kStretch] = static_cast<double>(topology.nodes().size() - 1);
  double max_prop = 0.0;
  for (const Link& l : topology.links()) {
    max_prop = std::max(max_prop, l.prop_delay_ms);
  }
  t.values[kMeanDelay] = LinkDelay(1.0, 1.0, max_prop);
  t.values[kThroughput] = 0.0;
  t.values[kLoss] = kMaxUtilization;
  return t;
}

std::array<double, kNumMetrics> EvalReport::Overall() const {
  std::array<double, kNumMetrics> out{};
  if (per_tm.empty()) return out;
  for (const TmMetrics& t : per_tm) {
    for (int m = 0; m < kNumMetrics; ++m) out[m] += t.values[m];
  }
  for (double& v : out) v /= static_cast<double>(per_tm.size());
  return out;
}

Comparison Compare(const EvalReport& a, const EvalReport& b) {
  auto rel = [](double base, double other) {
    if (base == 0.0) {
      return other == 0.0 ? 0.0 : std::numeric_limits<double>::quiet_NaN();
    }
    return (other - base) / base;
  };
  std::map<std::string, const TmMetrics*> by_tag;
  for (const TmMetrics& t : b.per_tm) by_tag[t.tag] = &t;
  Comparison c;
  c.base = a.name;
  c.other = b.name;
  for (const TmMetrics& ta : a.per_tm) {
    auto it = by_tag.find(ta.tag);
    if (it == by_tag.end()) continue;
    const TmMetrics& tb = *it->second;
    c.tags.push_back(ta.tag);
    for (int m = 0; m < kNumMetrics; ++m) {
      c.relative[m].push_back(rel(ta.values[m], tb.values[m]));
      const bool better = HigherIsBetter(static_cast<Metric>(m))
                              ? tb.values[m] > ta.values[m]
                              : tb.values[m] < ta.values[m];
      if (better) ++c.wins[m];
    }
  }
  if (c.tags.empty()) {
    Throw(ErrorKind::kValidation,
          "compare: reports share no traffic matrix tags");
  }
  const auto oa = a.Overall();
  const auto ob = b.Overall();
  for (int m = 0; m < kNumMetrics; ++m) c.overall_relative[m] = rel(oa[m], ob[m]);
  return c;
}

nlohmann::json ToJson(const EvalReport& report) {
  nlohmann::json j;
  j["schema_version"] = kReportSchemaVersion;
  j["name"] = report.name;
  j["metadata"] = report.metadata;
  nlohmann::json rows = nlohmann::json::array();
  for (const TmMetrics& t : report.per_tm) {
    nlohmann::json r;
    r["tm_tag"] = t.tag;
    for (int m = 0; m < kNumMetrics; ++m) {
      r[std::string(kMetricColumns[m])] = t.values[m];
    }
    r["idle"] = t.idle;
    r["extraction_failed"] = t.extraction_failed;
    rows.push_back(std::move(r));
  }
  j["per_tm"] = std::move(rows);
  nlohmann::json overall;
  const auto o = report.Overall();
  for (int m = 0; m < kNumMetrics; ++m) {
    overall[std::string(kMetricColumns[m])] = o[m];
  }
  j["overall"] = std::move(overall);
  return j;
}

EvalReport ReportFromJson(const nlohmann::json& j) {
  try {
    if (j.at("schema_version").get<int>() != kReportSchemaVersion) {
      Throw(ErrorKind::kValidation, "report: unsupported schema_version");
    }
    EvalReport r;
    r.name = j.at("name").get<std::string>();
    r.metadata = j.value("metadata", nlohmann::json::object());
    for (const auto& row : j.at("per_tm")) {
      TmMetrics t;
      t.tag = row.at("tm_tag").get<std::string>();
      for (int m = 0; m < kNumMetrics; ++m) {
        t.values[m] = row.at(std::string(kMetricColumns[m])).get<double>();
      }
      t.idle = row.value("idle", false);
      t.extraction_failed = row.value("extraction_failed", false);
      r.per_tm.push_back(std::move(t));
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    Throw(ErrorKind::kParse, std::string("report: ") + e.what());
  }
}

nlohmann::json ToJson(const Comparison& c) {
  nlohmann::json j;
  j["schema_version"] = kReportSchemaVersion;
  j["base"] = c.base;
  j["other"] = c.other;
  j["tm_tags"] = c.tags;
  for (int m = 0; m < kNumMetrics; ++m) {
    const std::string key(kMetricColumns[m]);
    nlohmann::json rel = nlohmann::json::array();
    for (double v : c.relative[m]) rel.push_back(NumberOrNull(v));
    j["relative"][key] = std::move(rel);
    j["overall_relative"][key] = NumberOrNull(c.overall_relative[m]);
    j["wins"][key] = c.wins[m];
  }
  j["n_tms"] = c.tags.size();
  return j;
}

std::string ReportCsv(const EvalReport& report) {
  std::string out = "tm_tag";
  for (std::string_view c : kMetricColumns) {
    out += ',';
    out += c;
  }
  out += '\n';
  for (const TmMetrics& t : report.per_tm) {
    out += t.tag;
    for (double v : t.values) {
      out += ',';
      out += FormatDouble(v);
    }
    out += '\n';
  }
  return out;
}

void EmitReports(const std::vector<EvalReport>& reports,
                 const std::filesystem::path& dir) {
  if (reports.empty()) Throw(ErrorKind::kValidation, "emit_report: no reports");
  std::filesystem::create_directories(dir);
  nlohmann::json all;
  all["schema_version"] = kReportSchemaVersion;
  all["reports"] = nlohmann::json::array();
  for (const EvalReport& r : reports) {
    all["reports"].push_back(ToJson(r));
    WriteFileAtomic(dir / (r.name + ".csv"), ReportCsv(r));
  }
  WriteFileAtomic(dir / "reports.json", all.dump(2) + "\n");

  // Panels: rows keyed by the first report's tags.
  for (int m = 0; m < kNumMetrics; ++m) {
    std::string csv = "tm_tag";
    for (const EvalReport& r : reports) csv += "," + r.name;
    csv += '\n';
    for (std::size_t i = 0; i < reports.front().per_tm.size(); ++i) {
      const std::string& tag = reports.front().per_tm[i].tag;
      csv += tag;
      for (const EvalReport& r : reports) {
        csv += ',';
        auto it = std::find_if(r.per_tm.begin(), r.per_tm.end(),
                               [&](const TmMetrics& t) { return t.tag == tag; });
        if (it != r.per_tm.end()) csv += FormatDouble(it->values[m]);
      }
      csv += '\n';
    }
    WriteFileAtomic(dir / ("panel_" + std::string(kMetricColumns[m]) + ".csv"),
                    csv);
  }
}

std::vector<EvalReport> ReadReports(const std::filesystem::path& dir) {
  const auto path = dir / "reports.json";
  if (!std::filesystem::exists(path)) {
    Throw(ErrorKind::kStageInputMissing, "missing " + path.string());
  }
  nlohmann::json all;
  try {
    all = nlohmann::json::parse(ReadFile(path));
  } catch (const nlohmann::json::exception& e) {
    Throw(ErrorKind::kParse, path.string() + ": " + e.what());
  }
  if (all.value("schema_version", -1) != kReportSchemaVersion) {
    Throw(ErrorKind::kValidation, path.string() + ": unsupported schema_version");
  }
  std::vector<EvalReport> out;
  for (const auto& j : all.at("reports")) out.push_back(ReportFromJson(j));
  return out;
}

}  // namespace xnet
