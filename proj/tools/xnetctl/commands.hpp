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

// xnetctl stages. Each writes into its own subdirectory of config.out:
//
//   train/      qtables_<tag>.csv, state_<tag>.csv, tm_<tag>.csv
//   dataset/    dataset.csv, dataset.meta.json
//   surrogate/  model.json, fidelity.csv
//   explain/    shap.csv, shap_dependence.csv, pdp.csv, ice.csv, ranking.json
//   tune/       tune_result.json, ranking.csv
//   eval/       reports.json, <report>.csv, panel_<metric>.csv, comparison.json
//
// plus a manifest.json per stage carrying schema_version and topology hash.

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "config.hpp"
#include "xnet/qrouter.hpp"

namespace xnetctl {

inline constexpr int kStageSchemaVersion = 1;

void CmdTrain(const RunConfig& config, std::ostream& log);
void CmdDataset(const RunConfig& config, std::ostream& log);
void CmdSurrogate(const RunConfig& config, std::ostream& log);
void CmdExplain(const RunConfig& config, std::ostream& log);
void CmdTune(const RunConfig& config, std::ostream& log);
void CmdEval(const RunConfig& config, std::ostream& log);
void CmdPipeline(const RunConfig& config, std::ostream& log);

/// File-name-safe form of a TM tag ("05:00" -> "05-00").
std::string TagSlug(const std::string& tag);
/// "baseline" for equal weights, otherwise "b0.6_d0.3_l0.1".
std::string WeightsSlug(const xnet::RewardWeights& w);

/// Process exit code for an error kind.
int ExitCode(xnet::ErrorKind kind);
/// CLI error class: config-error, stage-input-missing, validation-error or
/// runtime-error.
std::string ErrorClass(xnet::ErrorKind kind);

}  // namespace xnetctl
