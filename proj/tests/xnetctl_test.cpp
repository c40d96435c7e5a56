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

#include <filesystem>
#include <sstream>

#include "commands.hpp"
#include "config.hpp"
#include "oracles.hpp"

namespace xnetctl {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

const fs::path kSource = XNET_SOURCE_DIR;
const fs::path kTriangleConfig = kSource / "tests/fixtures/triangle/config.json";

fs::path Scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("xnetctl_test_" + name);
  fs::remove_all(dir);
  return dir;
}

xnet::ErrorKind KindOf(const std::function<void()>& f) {
  try {
    f();
  } catch (const xnet::Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return xnet::ErrorKind::kRuntime;
}

TEST(Config, DefaultsRoundTripThroughJson) {
  RunConfig c;
  c.out = "/tmp/xnet_out";
  const RunConfig r = ConfigFromJson(ConfigToJson(c), "/");
  EXPECT_EQ(ConfigToJson(r), ConfigToJson(c));
  EXPECT_EQ(c.AgentParams().seed, c.seed);
}

TEST(Config, RejectsUnknownKeysAndBadValues) {
  EXPECT_EQ(KindOf([] { ConfigFromJson(json{{"sead", 1}}, "/"); }), xnet::ErrorKind::kConfig);
  EXPECT_EQ(KindOf([] { ConfigFromJson(json{{"agent", {{"alpha", "x"}}}}, "/"); }),
            xnet::ErrorKind::kConfig);
  RunConfig c;
  c.test_frac = 2.0;
  EXPECT_EQ(KindOf([&] { ValidateConfig(c); }), xnet::ErrorKind::kConfig);
  c = RunConfig{};
  c.topology_source = "file";
  c.topology_path = "/nonexistent/topology.csv";
  EXPECT_EQ(KindOf([&] { ValidateConfig(c); }), xnet::ErrorKind::kConfig);
  EXPECT_EQ(KindOf([] { LoadConfig("/nonexistent/config.json"); }), xnet::ErrorKind::kConfig);
}

TEST(Config, RelativePathsResolveAgainstConfigDir) {
  const RunConfig c = LoadConfig(kTriangleConfig);
  EXPECT_EQ(c.topology_path, kTriangleConfig.parent_path() / "topology.csv");
  EXPECT_EQ(c.seed, 7u);
  EXPECT_NO_THROW(ValidateConfig(c));
}

TEST(Config, ParseWeights) {
  EXPECT_EQ(ParseWeights("equal"), xnet::RewardWeights::Equal());
  EXPECT_EQ(ParseWeights("0.6,0.3,0.1"), xnet::RewardWeights(0.6, 0.3, 0.1));
  EXPECT_EQ(ParseWeights("0.333,0.333,0.334").bwd(), 0.333);
  const xnet::RewardWeights rescaled = ParseWeights("0.3333,0.3333,0.3333");
  EXPECT_NEAR(rescaled.bwd() + rescaled.delay() + rescaled.pkloss(), 1.0, 1e-12);
  EXPECT_THROW(ParseWeights("0.5,0.5,0.5"), xnet::Error);
  EXPECT_THROW(ParseWeights("0.5,0.5"), xnet::Error);
  EXPECT_THROW(ParseWeights("-0.5,1,0.5"), xnet::Error);
}

TEST(Naming, Slugs) {
  EXPECT_EQ(TagSlug("05:30"), "05-30");
  EXPECT_EQ(TagSlug("a b"), "a_b");
  EXPECT_EQ(WeightsSlug(xnet::RewardWeights::Equal()), "baseline");
  EXPECT_EQ(WeightsSlug(xnet::RewardWeights(0.6, 0.3, 0.1)), "b0.6_d0.3_l0.1");
  EXPECT_EQ(ErrorClass(xnet::ErrorKind::kParse), "validation-error");
  EXPECT_EQ(ErrorClass(xnet::ErrorKind::kStageInputMissing), "stage-input-missing");
  EXPECT_NE(ExitCode(xnet::ErrorKind::kConfig), 0);
}

TEST(Stages, MissingUpstreamIsReported) {
  RunConfig c = LoadConfig(kTriangleConfig);
  c.out = Scratch("missing");
  std::ostringstream log;
  for (auto cmd : {CmdDataset, CmdSurrogate, CmdExplain}) {
    EXPECT_EQ(KindOf([&] { cmd(c, log); }), xnet::ErrorKind::kStageInputMissing);
  }
}

TEST(Stages, TopologyMismatchIsAValidationError) {
  RunConfig c = LoadConfig(kTriangleConfig);
  c.out = Scratch("mismatch");
  std::ostringstream log;
  CmdTrain(c, log);
  c.topology_source = "builtin";
  EXPECT_EQ(KindOf([&] { CmdDataset(c, log); }), xnet::ErrorKind::kValidation);
  fs::remove_all(c.out);
}

class TrianglePipeline : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    config_ = new RunConfig(LoadConfig(kTriangleConfig));
    config_->out = Scratch("triangle_a");
    std::ostringstream log;
    CmdPipeline(*config_, log);
    summary_ = new std::string(log.str());
  }
  static void TearDownTestSuite() {
    fs::remove_all(config_->out);
    delete config_;
    delete summary_;
  }
  static RunConfig* config_;
  static std::string* summary_;
};

RunConfig* TrianglePipeline::config_ = nullptr;
std::string* TrianglePipeline::summary_ = nullptr;

TEST_F(TrianglePipeline, ProducesEveryStage) {
  for (const char* stage : {"train", "dataset", "surrogate", "explain", "tune", "eval"}) {
    const json m = json::parse(xnet::ReadFile(config_->out / stage / "manifest.json"));
    EXPECT_EQ(m["stage"], stage);
    EXPECT_EQ(m["schema_version"], kStageSchemaVersion);
    EXPECT_FALSE(m["config"].contains("out"));
  }
  const json cmp = json::parse(xnet::ReadFile(config_->out / "eval/comparison.json"));
  EXPECT_EQ(cmp["comparisons"].size(), 2u);
  EXPECT_EQ(cmp["comparisons"][0]["base"], "baseline");
  EXPECT_NE(summary_->find("surrogate: selected"), std::string::npos);
}

TEST_F(TrianglePipeline, MatchesGoldenFiles) {
  const fs::path golden = kSource / "tests/golden/triangle";
  std::size_t checked = 0;
  for (const auto& e : fs::recursive_directory_iterator(golden)) {
    if (!e.is_regular_file()) continue;
    const fs::path rel = fs::relative(e.path(), golden);
    EXPECT_EQ(xnet::ReadFile(config_->out / rel), xnet::ReadFile(e.path())) << rel;
    ++checked;
  }
  EXPECT_GE(checked, 5u);
}

TEST_F(TrianglePipeline, RerunIsByteIdentical) {
  RunConfig c = *config_;
  c.out = Scratch("triangle_b");
  std::ostringstream log;
  CmdPipeline(c, log);
  EXPECT_EQ(oracle::DiffTrees(config_->out, c.out), "");
  fs::remove_all(c.out);
}

TEST_F(TrianglePipeline, StagesComposeToPipeline) {
  RunConfig c = *config_;
  c.out = Scratch("triangle_c");
  std::ostringstream log;
  for (auto cmd : {CmdTrain, CmdDataset, CmdSurrogate, CmdExplain, CmdTune, CmdEval}) {
    cmd(c, log);
  }
  EXPECT_EQ(oracle::DiffTrees(config_->out, c.out), "");
  fs::remove_all(c.out);
}

}  // namespace
}  // namespace xnetctl
