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
#include <random>
#include <set>

#include "oracles.hpp"
#include "xnet/common.hpp"
#include "xnet/netcore.hpp"

namespace xnet {
namespace {

Topology Triangle() {
  return Topology::Create({{"A", "B", 10, 1}, {"B", "C", 10, 2}, {"A", "C", 5, 4}});
}

ErrorKind KindOf(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::kRuntime;
}

TEST(Common, FormatDoubleRoundTrips) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int i = 0; i < 1000; ++i) {
    const double v = u(rng) * std::pow(10.0, static_cast<int>(rng() % 20) - 10);
    EXPECT_EQ(ParseDouble(FormatDouble(v), "t"), v);
  }
  EXPECT_EQ(FormatDouble(0.1), "0.1");
  EXPECT_EQ(FormatDouble(2.0), "2");
}

TEST(Common, ParseDoubleIsStrict) {
  EXPECT_EQ(ParseDouble(" 1.5 ", "t"), 1.5);
  EXPECT_EQ(KindOf([] { ParseDouble("1.5x", "t"); }), ErrorKind::kParse);
  EXPECT_EQ(KindOf([] { ParseDouble("", "t"); }), ErrorKind::kParse);
}

TEST(Common, CsvHelpers) {
  EXPECT_EQ(SplitCsvLine("a,,b"), (std::vector<std::string>{"a", "", "b"}));
  EXPECT_EQ(SplitLines("x\r\ny\n"), (std::vector<std::string>{"x", "y"}));
  EXPECT_EQ(Trim("  q \t"), "q");
}

TEST(Common, MixSeedSeparatesStreams) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t s = 0; s < 50; ++s) {
    for (std::uint64_t k = 0; k < 4; ++k) seen.insert(MixSeed(s, k));
  }
  EXPECT_EQ(seen.size(), 200u);
  EXPECT_EQ(MixSeed(7, 2), MixSeed(7, 2));
}

TEST(Common, RngIndexStaysInRange) {
  Rng rng(11);
  std::vector<int> hist(7, 0);
  for (int i = 0; i < 7000; ++i) ++hist[rng.Index(7)];
  for (int h : hist) EXPECT_GT(h, 800);
}

TEST(Common, ParallelForVisitsEachIndexOnce) {
  std::vector<int> hits(1000, 0);
  ParallelFor(hits.size(), [&](std::size_t i) { ++hits[i]; });
  for (int h : hits) EXPECT_EQ(h, 1);
}

TEST(Common, WriteFileAtomicReplacesContents) {
  const auto dir = std::filesystem::temp_directory_path() / "xnet_atomic_test";
  std::filesystem::create_directories(dir);
  WriteFileAtomic(dir / "f.txt", "one");
  WriteFileAtomic(dir / "f.txt", "two");
  EXPECT_EQ(ReadFile(dir / "f.txt"), "two");
  std::size_t entries = 0;
  for ([[maybe_unused]] const auto& e : std::filesystem::directory_iterator(dir)) ++entries;
  EXPECT_EQ(entries, 1u);
  std::filesystem::remove_all(dir);
}

TEST(Topology, ArcsAndAdjacency) {
  const Topology t = Triangle();
  EXPECT_EQ(t.num_nodes(), 3);
  EXPECT_EQ(t.num_arcs(), 6);
  for (NodeIndex v = 0; v < 3; ++v) {
    const auto& out = t.out_arcs(v);
    for (std::size_t i = 1; i < out.size(); ++i) {
      EXPECT_LT(t.arcs()[out[i - 1]].dst, t.arcs()[out[i]].dst);
    }
  }
  const ArcIndex ab = *t.FindArc(0, 1), ba = *t.FindArc(1, 0);
  EXPECT_EQ(t.arcs()[ab].capacity_mbps, 10.0);
  EXPECT_EQ(t.arcs()[ab].link, t.arcs()[ba].link);
}

TEST(Topology, RejectsInvalidLinks) {
  EXPECT_EQ(KindOf([] { Topology::Create({{"A", "A", 1, 1}}); }), ErrorKind::kValidation);
  EXPECT_EQ(KindOf([] { Topology::Create({{"A", "B", 0, 1}}); }), ErrorKind::kValidation);
  EXPECT_EQ(KindOf([] { Topology::Create({{"A", "B", 1, -1}}); }), ErrorKind::kValidation);
  EXPECT_EQ(KindOf([] { Topology::Create({{"A", "B", 1, 1}, {"B", "A", 1, 1}}); }),
            ErrorKind::kValidation);
  EXPECT_EQ(KindOf([] { Topology::Create({{"A", "B", 1, 1}, {"C", "D", 1, 1}}); }),
            ErrorKind::kValidation);
}

TEST(Topology, CsvRoundTripAndHash) {
  const Topology t = Triangle();
  const Topology u = ParseTopologyCsv(WriteTopologyCsv(t));
  EXPECT_EQ(t, u);
  EXPECT_EQ(TopologyHash(t), TopologyHash(u));
  const Topology v = Topology::Create({{"A", "B", 10, 1}, {"B", "C", 10, 2}, {"A", "C", 6, 4}});
  EXPECT_NE(TopologyHash(t), TopologyHash(v));
  EXPECT_EQ(ParseTopologyCsv("src,dst,capacity_mbps\nA,B,3\n").arcs()[0].prop_delay_ms,
            kDefaultPropDelayMs);
  EXPECT_EQ(KindOf([] { ParseTopologyCsv("a,b\n"); }), ErrorKind::kParse);
}

TEST(Topology, BuiltinGeantShape) {
  const Topology& g = BuiltinGeant();
  EXPECT_EQ(g.num_nodes(), 23);
  EXPECT_EQ(static_cast<int>(g.links().size()), 37);
  std::set<double> tiers;
  for (const Link& l : g.links()) tiers.insert(l.capacity_mbps);
  EXPECT_EQ(tiers, (std::set<double>{1.55, 25.0, 100.0}));
  EXPECT_EQ(ParseTopologyCsv(BuiltinGeantCsv()), g);
}

TEST(Paths, ShortestHopsMatchesEnumeration) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const Topology t = oracle::RandomConnectedGraph(3 + trial % 6, 0.3, rng);
    for (NodeIndex s = 0; s < t.num_nodes(); ++s) {
      const auto dist = HopDistancesTo(t, s);
      for (NodeIndex d = 0; d < t.num_nodes(); ++d) {
        if (s == d) continue;
        std::vector<std::vector<int>> all;
        oracle::SimplePaths(t, s, d, all);
        std::size_t best = all.front().size();
        std::vector<int> lex = all.front();
        for (const auto& p : all) {
          if (p.size() < best || (p.size() == best && p < lex)) {
            best = p.size();
            lex = p;
          }
        }
        const Path got = ShortestPathHops(t, s, d);
        EXPECT_TRUE(IsValidPath(t, got, s, d));
        EXPECT_EQ(got.nodes, lex);
        EXPECT_EQ(HopDistancesTo(t, d)[s], static_cast<int>(best) - 1);
      }
      EXPECT_EQ(dist[s], 0);
    }
  }
}

TEST(Paths, IsValidPathRejectsLoopsAndGaps) {
  const Topology t = Triangle();
  EXPECT_TRUE(IsValidPath(t, Path{{0, 1, 2}}, 0, 2));
  EXPECT_FALSE(IsValidPath(t, Path{{0, 1, 0, 2}}, 0, 2));
  EXPECT_FALSE(IsValidPath(t, Path{{0, 1}}, 0, 2));
  EXPECT_FALSE(IsValidPath(t, Path{}, 0, 2));
}

TEST(Traffic, CsvReordersToTopologyOrder) {
  const Topology t = Triangle();
  const std::string csv = ",C,A,B\nC,0,1,2\nA,3,0,4\nB,5,6,0\n";
  const TrafficMatrix tm = ParseTrafficMatrixCsv(t, csv, "09:00");
  EXPECT_EQ(tm.tag, "09:00");
  EXPECT_EQ(tm.demand(0, 1), 4.0);  // A -> B
  EXPECT_EQ(tm.demand(0, 2), 3.0);  // A -> C
  EXPECT_EQ(tm.demand(2, 0), 1.0);  // C -> A
  EXPECT_EQ(ParseTrafficMatrixCsv(t, WriteTrafficMatrixCsv(t, tm), "x").demand, tm.demand);
  EXPECT_EQ(KindOf([&] { ParseTrafficMatrixCsv(t, ",A,B\nA,0,1\nB,1,0\n", "x"); }),
            ErrorKind::kParse);
  EXPECT_EQ(KindOf([&] {
              ParseTrafficMatrixCsv(t, ",A,B,C\nA,1,1,1\nB,1,0,1\nC,1,1,0\n", "x");
            }),
            ErrorKind::kValidation);
}

TEST(Traffic, TagHelpers) {
  EXPECT_EQ(TagMinutes("09:30"), 570);
  EXPECT_FALSE(TagMinutes("25:00"));
  EXPECT_FALSE(TagMinutes("9:30"));
  EXPECT_EQ(TrafficMatrixFileName("09:30"), "tm_09-30.csv");
  EXPECT_TRUE(IsPeakTag("05:00"));
  EXPECT_TRUE(IsPeakTag("12:59"));
  EXPECT_FALSE(IsPeakTag("13:00"));
  EXPECT_FALSE(IsPeakTag("04:59"));
}

TEST(Traffic, DiurnalProfilePeaksInTheMorning) {
  EXPECT_DOUBLE_EQ(DiurnalProfile(9.0), 1.0);
  double lowest = 1.0;
  for (double h = 0.0; h < 24.0; h += 0.25) {
    const double p = DiurnalProfile(h);
    EXPECT_GT(p, 0.0);
    EXPECT_LE(p, 1.0);
    lowest = std::min(lowest, p);
  }
  EXPECT_DOUBLE_EQ(DiurnalProfile(21.0), lowest);
}

TEST(Traffic, SynthDiurnalIsSeededAndValid) {
  const Topology& g = BuiltinGeant();
  const auto a = SynthDiurnal(g, 16, 4, 1.0);
  const auto b = SynthDiurnal(g, 16, 4, 1.0);
  const auto c = SynthDiurnal(g, 16, 5, 1.0);
  ASSERT_EQ(a.size(), 16u);
  int peak = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ValidateTrafficMatrix(g, a[i]);
    EXPECT_EQ(a[i].demand, b[i].demand);
    EXPECT_NE(a[i].demand, c[i].demand);
    EXPECT_TRUE(TagMinutes(a[i].tag).has_value());
    peak += IsPeakTag(a[i].tag);
  }
  EXPECT_EQ(a[0].tag, "00:45");
  EXPECT_EQ(peak, 6);
  const auto halved = SynthDiurnal(g, 16, 4, 0.5);
  EXPECT_NEAR(halved[3].total(), 0.5 * a[3].total(), 1e-9 * a[3].total());
  EXPECT_THROW(SynthDiurnal(g, 16, 4, 1.5), Error);
}

}  // namespace
}  // namespace xnet
