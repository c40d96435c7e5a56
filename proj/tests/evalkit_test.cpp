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

#include <cmath>
#include <filesystem>

#include "xnet/evalkit.hpp"

namespace xnet {
namespace {

Topology Triangle() {
  return Topology::Create({{"A", "B", 10, 1}, {"B", "C", 10, 2}, {"A", "C", 5, 4}});
}

EvalReport MakeReport(const std::string& name,
                      const std::vector<std::pair<std::string, std::array<double, 4>>>& rows) {
  EvalReport r;
  r.name = name;
  for (const auto& [tag, v] : rows) {
    TmMetrics t;
    t.tag = tag;
    t.values = v;
    r.per_tm.push_back(t);
  }
  return r;
}

TEST(Stretch, HandComputed) {
  const Topology t = Triangle();
  RouteSet routes = ShortestPathRoutes(t);
  EXPECT_DOUBLE_EQ(MeanStretch(routes, t), 1.0);
  routes.set(0, 2, Path{{0, 1, 2}});
  EXPECT_DOUBLE_EQ(MeanStretch(routes, t), (5.0 + 2.0) / 6.0);
  routes.set(0, 2, Path{});
  EXPECT_THROW(MeanStretch(routes, t), Error);
}

TEST(LinkAverages, LoadedLinksAndIdleFallback) {
  const Topology t = Triangle();
  const LinkMetrics idle = IdleMetrics(t);
  const LinkAverage d = MeanLinkDelay(idle);
  EXPECT_TRUE(d.idle);
  EXPECT_DOUBLE_EQ(d.value, (1.0 + 2.0 + 4.0) / 3.0);
  EXPECT_TRUE(MeanLinkThroughput(idle).idle);
  EXPECT_EQ(MeanLinkThroughput(idle).value, 0.0);

  TrafficMatrix tm{"x", Eigen::MatrixXd::Zero(3, 3)};
  tm.demand(0, 1) = 5.0;
  tm.demand(1, 2) = 20.0;
  const LinkMetrics m = ApplyRoutes(t, ShortestPathRoutes(t), tm);
  EXPECT_FALSE(MeanLinkDelay(m).idle);
  EXPECT_NEAR(MeanLinkDelay(m).value, (1.0 / 0.5 + 2.0 / 0.01) / 2.0, 1e-9);
  EXPECT_DOUBLE_EQ(MeanLinkThroughput(m).value, (5.0 + 10.0) / 2.0);
  EXPECT_DOUBLE_EQ(MeanLinkLoss(m).value, (0.0 + 0.5) / 2.0);
}

TEST(EvaluateTm, CombinesMetricsAndWorstCase) {
  const Topology t = Triangle();
  const RouteSet routes = ShortestPathRoutes(t);
  const TmMetrics idle = EvaluateTm("00:00", t, routes, IdleMetrics(t));
  EXPECT_TRUE(idle.idle);
  EXPECT_EQ(idle[kStretch], 1.0);
  const TmMetrics w = WorstCaseTm("01:00", t);
  EXPECT_TRUE(w.extraction_failed);
  EXPECT_EQ(w[kStretch], 2.0);
  EXPECT_DOUBLE_EQ(w[kMeanDelay], 4.0 / (1.0 - 0.99));
  EXPECT_EQ(w[kThroughput], 0.0);
  EXPECT_EQ(w[kLoss], 0.99);
}

TEST(Compare, RelativeDifferencesAndWins) {
  const EvalReport a = MakeReport("a", {{"t1", {2, 10, 5, 0.0}}, {"t2", {1, 20, 4, 0.2}}});
  const EvalReport b = MakeReport("b", {{"t2", {0.5, 10, 5, 0.1}},
                                        {"t1", {2, 5, 6, 0.1}},
                                        {"t9", {9, 9, 9, 0.9}}});
  const Comparison c = Compare(a, b);
  EXPECT_EQ(c.tags, (std::vector<std::string>{"t1", "t2"}));
  EXPECT_DOUBLE_EQ(c.relative[kStretch][0], 0.0);
  EXPECT_DOUBLE_EQ(c.relative[kStretch][1], -0.5);
  EXPECT_DOUBLE_EQ(c.relative[kMeanDelay][0], -0.5);
  EXPECT_TRUE(std::isnan(c.relative[kLoss][0]));
  EXPECT_DOUBLE_EQ(c.relative[kLoss][1], -0.5);
  EXPECT_EQ(c.wins[kStretch], 1);
  EXPECT_EQ(c.wins[kThroughput], 2);
  EXPECT_EQ(c.wins[kLoss], 1);
  EXPECT_THROW(Compare(a, MakeReport("z", {{"q", {1, 1, 1, 1}}})), Error);
}

TEST(Reports, JsonRoundTripWithNullForNaN) {
  const EvalReport a = MakeReport("a", {{"t1", {2, 10, 5, 0.0}}});
  const EvalReport b = MakeReport("b", {{"t1", {2, 5, 6, 0.1}}});
  const nlohmann::json cj = ToJson(Compare(a, b));
  EXPECT_TRUE(cj.dump().find("null") != std::string::npos);
  EXPECT_EQ(cj.dump().find("NaN"), std::string::npos);
  EvalReport r = a;
  r.metadata["seed"] = 4;
  EXPECT_EQ(ReportFromJson(nlohmann::json::parse(ToJson(r).dump())), r);
  EXPECT_EQ(ReportCsv(a).substr(0, ReportCsv(a).find('\n')),
            "tm_tag,mean_stretch,mean_delay_ms,mean_throughput_mbps,mean_loss");
}

TEST(Reports, EmitAndReadBack) {
  const auto dir = std::filesystem::temp_directory_path() / "xnet_reports_test";
  std::filesystem::remove_all(dir);
  const std::vector<EvalReport> reports = {
      MakeReport("baseline", {{"t1", {1.5, 10, 5, 0.0}}, {"t2", {1.25, 20, 4, 0.2}}}),
      MakeReport("b0.6_d0.3_l0.1", {{"t1", {1.0, 8, 5, 0.0}}, {"t2", {1.0, 9, 4, 0.1}}})};
  EmitReports(reports, dir);
  for (const char* f : {"reports.json", "baseline.csv", "b0.6_d0.3_l0.1.csv",
                        "panel_mean_stretch.csv", "panel_mean_loss.csv"}) {
    EXPECT_TRUE(std::filesystem::exists(dir / f)) << f;
  }
  EXPECT_EQ(ReadReports(dir), reports);
  const std::string panel = ReadFile(dir / "panel_mean_stretch.csv");
  EXPECT_EQ(panel, "tm_tag,baseline,b0.6_d0.3_l0.1\nt1,1.5,1\nt2,1.25,1\n");
  EXPECT_THROW(EmitReports({}, dir), Error);
  try {
    ReadReports(dir / "missing");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kStageInputMissing);
  }
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace xnet
