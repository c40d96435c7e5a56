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

#include <cstdint>
#include <exception>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "commands.hpp"

namespace {

void Fail(const std::string& cls, const std::string& message) {
  std::string line = message;
  for (char& ch : line) {
    if (ch == '\n' || ch == '\r') ch = ' ';
  }
  std::cerr << "error: " << cls << ": " << line << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"xnetctl: train, explain and tune reward weights for Q-learning routing"};
  app.set_version_flag("--version", "xnetctl 1.0");

  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> weights;
  bool print_config = false;
  bool warm_start = false;
  app.add_option("--config", config_path, "JSON run configuration");
  app.add_option("--out", out_dir, "Output directory (overrides config)");
  app.add_option("--seed", seed, "Global seed (overrides config)");
  app.add_option("--weights", weights,
                 "Reward weights 'b,d,l' or 'equal' to evaluate (repeatable)")
      ->take_all();
  app.add_flag("--print-config", print_config,
               "Print the effective configuration and exit");
  app.add_flag("--warm-start", warm_start,
               "Start each interval from the previous interval's Q-tables");

  const std::map<std::string, std::function<void(const xnetctl::RunConfig&, std::ostream&)>>
      commands = {{"train", xnetctl::CmdTrain},         {"dataset", xnetctl::CmdDataset},
                  {"surrogate", xnetctl::CmdSurrogate}, {"explain", xnetctl::CmdExplain},
                  {"tune", xnetctl::CmdTune},           {"eval", xnetctl::CmdEval},
                  {"pipeline", xnetctl::CmdPipeline}};
  const std::map<std::string, std::string> help = {
      {"train", "Train the equal-weight agent on every traffic matrix"},
      {"dataset", "Build the preprocessed dataset from trained Q-tables"},
      {"surrogate", "Fit the surrogate regressors and select the best"},
      {"explain", "SHAP, PDP and ICE for the selected surrogate"},
      {"tune", "Search reward weights, pruned by the SHAP ranking"},
      {"eval", "Evaluate weight configurations against the baseline"},
      {"pipeline", "Run all stages in order"}};
  for (const auto& [name, text] : help) {
    app.add_subcommand(name, text)->fallthrough();
  }
  app.require_subcommand(0, 1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    Fail("config-error", e.what());
    return xnetctl::ExitCode(xnet::ErrorKind::kConfig);
  }

  try {
    xnetctl::RunConfig config;
    if (!config_path.empty()) config = xnetctl::LoadConfig(config_path);
    if (!out_dir.empty()) config.out = out_dir;
    if (seed) config.seed = *seed;
    if (warm_start) config.warm_start = true;
    if (!weights.empty()) {
      config.eval_weights.clear();
      for (const auto& w : weights) config.eval_weights.push_back(xnetctl::ParseWeights(w));
    }
    if (print_config) {
      std::cout << xnetctl::ConfigToJson(config).dump(2) << "\n";
      return 0;
    }
    const auto subs = app.get_subcommands();
    if (subs.empty()) {
      Fail("config-error", "no command given; see --help");
      return xnetctl::ExitCode(xnet::ErrorKind::kConfig);
    }
    xnetctl::ValidateConfig(config);
    commands.at(subs.front()->get_name())(config, std::cout);
  } catch (const xnet::Error& e) {
    Fail(xnetctl::ErrorClass(e.kind()), e.what());
    return xnetctl::ExitCode(e.kind());
  } catch (const std::exception& e) {
    Fail("runtime-error", e.what());
    return xnetctl::ExitCode(xnet::ErrorKind::kRuntime);
  }
  return 0;
}
