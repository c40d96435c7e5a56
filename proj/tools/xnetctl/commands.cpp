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

#include "commands.hpp"

#include <cstdio>
#include <filesystem>
#include <ostream>
#include <set>

#include "json.hpp"
#include "xnet/datakit.hpp"
#include "xnet/evalkit.hpp"
#include "xnet/flowsim.hpp"
#include "xnet/surrogate.hpp"
#include "xnet/tuner.hpp"
#include "xnet/xaikit.hpp"

namespace xnetctl {

namespace fs = std::filesystem;
using nlohmann::json;
using xnet::ErrorKind;
using xnet::Throw;

namespace {

std::string Fixed(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

json Manifest(const std::string& stage, const RunConfig& c,
              const xnet::Topology& topology) {
  json config = ConfigToJson(c);
  config.erase("out");
  return {{"schema_version", kStageSchemaVersion},
          {"stage", stage},
          {"topology_hash", xnet::TopologyHash(topology)},
          {"seed", c.seed},
          {"config", config}};
}

void WriteJson(const fs::path& path, const json& j) {
  xnet::WriteFileAtomic(path, j.dump(2) + "\n");
}

json ReadJson(const fs::path& path) {
  if (!fs::exists(path)) {
    Throw(ErrorKind::kStageInputMissing, "missing " + path.string());
  }
  try {
    return json::parse(xnet::ReadFile(path));
  } catch (const json::exception& e) {
    Throw(ErrorKind::kValidation, path.string() + ": " + e.what());
  }
}

// Loads an upstream stage manifest and checks it belongs to this topology.
json RequireStage(const RunConfig& c, const std::string& stage,
                  const xnet::Topology& topology) {
  const fs::path path = c.out / stage / "manifest.json";
  if (!fs::exists(path)) {
    Throw(ErrorKind::kStageInputMissing,
          "stage '" + stage + "' has no output in " + c.out.string() +
              "; run 'xnetctl " + stage + "' first");
  }
  const json m = ReadJson(path);
  if (m.value("schema_version", -1) != kStageSchemaVersion) {
    Throw(ErrorKind::kValidation, path.string() + ": unsupported schema_version");
  }
  if (m.value("topology_hash", std::string()) != xnet::TopologyHash(topology)) {
    Throw(ErrorKind::kValidation,
          path.string() + ": produced for a different topology");
  }
  return m;
}

fs::path StageDir(const RunConfig& c, const std::string& stage) {
  const fs::path dir = c.out / stage;
  fs::create_directories(dir);
  return dir;
}

json WeightsJson(const xnet::RewardWeights& w) {
  return json::array({w.bwd(), w.delay(), w.pkloss()});
}

std::vector<std::string> FeatureNames() {
  return {std::begin(xnet::kFeatureNames), std::end(xnet::kFeatureNames)};
}

}  // namespace

std::string TagSlug(const std::string& tag) {
  std::string out;
  for (char ch : tag) {
    if (ch == ':') {
      out += '-';
    } else if (std::isalnum(static_cast<unsigned char>(ch)) || ch == '-' ||
               ch == '_' || ch == '.') {
      out += ch;
    } else {
      out += '_';
    }
  }
  return out.empty() ? "tm" : out;
}

std::string WeightsSlug(const xnet::RewardWeights& w) {
  if (w == xnet::RewardWeights::Equal()) return "baseline";
  auto part = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return std::string(buf);
  };
  return "b" + part(w.bwd()) + "_d" + part(w.delay()) + "_l" + part(w.pkloss());
}

int ExitCode(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kConfig:
      return 2;
    case ErrorKind::kStageInputMissing:
      return 3;
    case ErrorKind::kParse:
    case ErrorKind::kValidation:
      return 4;
    case ErrorKind::kRuntime:
      return 5;
  }
  return 5;
}

std::string ErrorClass(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kConfig:
      return "config-error";
    case ErrorKind::kStageInputMissing:
      return "stage-input-missing";
    case ErrorKind::kParse:
    case ErrorKind::kValidation:
      return "validation-error";
    case ErrorKind::kRuntime:
      return "runtime-error";
  }
  return "runtime-error";
}

void CmdTrain(const RunConfig& c, std::ostream& log) {
  const xnet::Topology topology = ResolveTopology(c);
  const auto tms = ResolveTraffic(c, topology);
  std::set<std::string> slugs;
  for (const auto& tm : tms) {
    if (!slugs.insert(TagSlug(tm.tag)).second) {
      Throw(ErrorKind::kValidation, "duplicate traffic matrix tag '" + tm.tag + "'");
    }
  }
  const fs::path dir = StageDir(c, "train");
  const auto results = xnet::RunIntervals(xnet::RewardWeights::Equal(), topology,
                                          tms, c.AgentParams(), c.warm_start);
  json manifest = Manifest("train", c, topology);
  json entries = json::array();
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i];
    const std::string slug = TagSlug(r.tag);
    xnet::WriteFileAtomic(dir / ("qtables_" + slug + ".csv"),
                          xnet::WriteQTablesCsv(topology, r.tables));
    xnet::WriteFileAtomic(dir / ("state_" + slug + ".csv"),
                          xnet::WriteLinkMetricsCsv(topology, r.input));
    xnet::WriteFileAtomic(dir / ("tm_" + slug + ".csv"),
                          xnet::WriteTrafficMatrixCsv(topology, tms[i]));
    entries.push_back({{"tag", r.tag},
                       {"qtables", "qtables_" + slug + ".csv"},
                       {"state", "state_" + slug + ".csv"},
                       {"traffic", "tm_" + slug + ".csv"},
                       {"extraction_failed", r.metrics.extraction_failed}});
    log << "train " << r.tag << ": stretch "
        << Fixed(r.metrics[xnet::kStretch]) << ", loss "
        << Fixed(r.metrics[xnet::kLoss])
        << (r.metrics.extraction_failed ? " (extraction failed)" : "") << "\n";
  }
  manifest["intervals"] = std::move(entries);
  WriteJson(dir / "manifest.json", manifest);
  log << "train: " << results.size() << " intervals on " << topology.num_nodes()
      << " nodes -> " << dir.string() << "\n";
}

void CmdDataset(const RunConfig& c, std::ostream& log) {
  const xnet::Topology topology = ResolveTopology(c);
  const json train = RequireStage(c, "train", topology);
  const fs::path train_dir = c.out / "train";
  std::vector<xnet::RawSample> raw;
  std::vector<std::string> tags;
  for (const json& e : train.at("intervals")) {
    const fs::path q = train_dir / e.at("qtables").get<std::string>();
    const fs::path s = train_dir / e.at("state").get<std::string>();
    for (const fs::path& p : {q, s}) {
      if (!fs::exists(p)) Throw(ErrorKind::kStageInputMissing, "missing " + p.string());
    }
    const xnet::QTables tables = xnet::ParseQTablesCsv(topology, xnet::ReadFile(q));
    const xnet::LinkMetrics state =
        xnet::ParseLinkMetricsCsv(topology, xnet::ReadFile(s));
    auto samples = xnet::ExtractSamples(topology, tables, xnet::NormalizeMetrics(state));
    raw.insert(raw.end(), samples.begin(), samples.end());
    tags.push_back(e.at("tag").get<std::string>());
  }
  xnet::Dataset data = xnet::Preprocess(raw);
  data.provenance = {{"tm_tags", tags},
                     {"seed", c.seed},
                     {"topology_hash", xnet::TopologyHash(topology)},
                     {"raw_samples", raw.size()},
                     {"agent", train.at("config").at("agent")}};
  const fs::path dir = StageDir(c, "dataset");
  xnet::WriteDataset(data, dir / "dataset.csv");
  json manifest = Manifest("dataset", c, topology);
  manifest["rows"] = data.rows();
  WriteJson(dir / "manifest.json", manifest);
  log << "dataset: " << raw.size() << " samples -> " << data.rows()
      << " rows after preprocessing -> " << (dir / "dataset.csv").string() << "\n";
}

namespace {

xnet::Dataset LoadStageDataset(const RunConfig& c, const xnet::Topology& topology) {
  RequireStage(c, "dataset", topology);
  const fs::path path = c.out / "dataset" / "dataset.csv";
  if (!fs::exists(path)) Throw(ErrorKind::kStageInputMissing, "missing " + path.string());
  return xnet::ReadDataset(path);
}

}  // namespace

void CmdSurrogate(const RunConfig& c, std::ostream& log) {
  const xnet::Topology topology = ResolveTopology(c);
  const xnet::Dataset data = LoadStageDataset(c, topology);
  const auto [train, test] = xnet::Split(data, c.test_frac, c.seed);
  const xnet::Dataset& eval_set = test.rows() > 0 ? test : train;

  std::vector<xnet::Surrogate> fitted;
  std::vector<xnet::Fidelity> fidelities;
  std::string csv = "model,r2,mse,n_test,status\n";
  auto attempt = [&](const std::string& name, json params, auto fit) {
    try {
      xnet::Surrogate s{name, fit(), std::move(params), json::object()};
      const xnet::Fidelity f = xnet::ComputeFidelity(s.model, eval_set);
      s.metadata = {{"r2", f.r2},
                    {"mse", f.mse},
                    {"n_test", f.n_test},
                    {"n_train", train.rows()},
                    {"seed", c.seed}};
      csv += name + "," + xnet::FormatDouble(f.r2) + "," + xnet::FormatDouble(f.mse) +
             "," + std::to_string(f.n_test) + ",ok\n";
      log << "surrogate " << name << ": r2 " << Fixed(f.r2) << ", mse "
          << Fixed(f.mse, 6) << "\n";
      fitted.push_back(std::move(s));
      fidelities.push_back(f);
    } catch (const xnet::Error& e) {
      if (e.kind() != ErrorKind::kValidation) throw;
      std::string msg = e.what();
      for (char& ch : msg) {
        if (ch == ',' || ch == '\n') ch = ';';
      }
      csv += name + ",,,," + "failed: " + msg + "\n";
      log << "surrogate " << name << ": not fitted (" << e.what() << ")\n";
    }
  };
  attempt("boosted",
          {{"n_rounds", c.boosted.n_rounds},
           {"eta", c.boosted.eta},
           {"max_depth", c.boosted.max_depth},
           {"lambda", c.boosted.lambda},
           {"min_leaf", c.boosted.min_leaf}},
          [&] { return xnet::Model(xnet::FitGbt(train.features, train.target, c.boosted)); });
  const xnet::ForestParams fp = c.ForestParamsSeeded();
  attempt("forest",
          {{"n_trees", fp.n_trees},
           {"max_depth", fp.max_depth},
           {"min_leaf", fp.min_leaf},
           {"feature_frac", fp.feature_frac},
           {"bootstrap", fp.bootstrap},
           {"seed", fp.seed}},
          [&] { return xnet::Model(xnet::FitForest(train.features, train.target, fp)); });
  attempt("ridge", {{"lambda", c.ridge_lambda}}, [&] {
    return xnet::Model(xnet::FitRidge(train.features, train.target, c.ridge_lambda));
  });
  attempt("linear", json::object(), [&] {
    return xnet::Model(xnet::FitLinear(train.features, train.target));
  });
  if (fitted.empty()) Throw(ErrorKind::kValidation, "surrogate: no model could be fitted");

  const std::size_t best = xnet::SelectBest(fidelities);
  const fs::path dir = StageDir(c, "surrogate");
  xnet::WriteFileAtomic(dir / "fidelity.csv", csv);
  WriteJson(dir / "model.json", xnet::ToJson(fitted[best]));
  json manifest = Manifest("surrogate", c, topology);
  manifest["selected"] = fitted[best].name;
  WriteJson(dir / "manifest.json", manifest);
  log << "surrogate: selected " << fitted[best].name << " -> "
      << (dir / "model.json").string() << "\n";
}

void CmdExplain(const RunConfig& c, std::ostream& log) {
  const xnet::Topology topology = ResolveTopology(c);
  const xnet::Dataset data = LoadStageDataset(c, topology);
  RequireStage(c, "surrogate", topology);
  const json model_json = ReadJson(c.out / "surrogate" / "model.json");
  const xnet::Surrogate surrogate = xnet::SurrogateFromJson(model_json);
  const xnet::Model& model = surrogate.model;
  const auto names = FeatureNames();

  const xnet::FeatureMatrix background = xnet::SampleRows(
      data.features, static_cast<std::size_t>(c.background_rows), xnet::MixSeed(c.seed, 1));
  const auto rank_idx = xnet::SampleRowIndices(
      data.rows(), static_cast<std::size_t>(c.rank_rows), xnet::MixSeed(c.seed, 2));
  xnet::FeatureMatrix rank_rows(static_cast<Eigen::Index>(rank_idx.size()), data.features.cols());
  for (std::size_t i = 0; i < rank_idx.size(); ++i) {
    rank_rows.row(static_cast<Eigen::Index>(i)) = data.features.row(rank_idx[i]);
  }
  const auto shap = xnet::ShapRows(model, rank_rows, background);
  const xnet::FeatureRanking ranking = xnet::RankFromShap(shap, names);

  std::string shap_csv = "row_id,feature,phi\n";
  std::string dep_csv = "row_id,feature,value,phi\n";
  for (std::size_t i = 0; i < shap.size(); ++i) {
    const std::string id = std::to_string(rank_idx[i]);
    for (std::size_t f = 0; f < names.size(); ++f) {
      const double phi = shap[i].phi[static_cast<Eigen::Index>(f)];
      shap_csv += id + "," + names[f] + "," + xnet::FormatDouble(phi) + "\n";
    }
  }
  for (std::size_t f = 0; f < names.size(); ++f) {
    const auto points = xnet::ShapDependence(shap, rank_rows, static_cast<int>(f));
    for (std::size_t i = 0; i < points.size(); ++i) {
      dep_csv += std::to_string(rank_idx[i]) + "," + names[f] + "," +
                 xnet::FormatDouble(points[i].first) + "," +
                 xnet::FormatDouble(points[i].second) + "\n";
    }
  }

  const auto curve_idx = xnet::SampleRowIndices(
      data.rows(), static_cast<std::size_t>(c.curve_rows), xnet::MixSeed(c.seed, 3));
  xnet::FeatureMatrix curve_rows(static_cast<Eigen::Index>(curve_idx.size()), data.features.cols());
  for (std::size_t i = 0; i < curve_idx.size(); ++i) {
    curve_rows.row(static_cast<Eigen::Index>(i)) = data.features.row(curve_idx[i]);
  }
  std::string pdp_csv = "feature,grid_value,mean_pred\n";
  std::string ice_csv = "feature,row_id,grid_value,pred\n";
  for (std::size_t f = 0; f < names.size(); ++f) {
    const xnet::IceCurves ice = xnet::Ice(model, curve_rows, static_cast<int>(f), c.grid_size);
    const xnet::PdpCurve pdp = xnet::PdpFromIce(ice);
    for (Eigen::Index g = 0; g < pdp.grid.size(); ++g) {
      pdp_csv += names[f] + "," + xnet::FormatDouble(pdp.grid[g]) + "," +
                 xnet::FormatDouble(pdp.mean[g]) + "\n";
    }
    for (Eigen::Index r = 0; r < ice.predictions.rows(); ++r) {
      const std::string id = std::to_string(curve_idx[static_cast<std::size_t>(r)]);
      for (Eigen::Index g = 0; g < ice.grid.size(); ++g) {
        ice_csv += names[f] + "," + id + "," + xnet::FormatDouble(ice.grid[g]) + "," +
                   xnet::FormatDouble(ice.predictions(r, g)) + "\n";
      }
    }
  }

  json rank_json;
  rank_json["schema_version"] = kStageSchemaVersion;
  rank_json["model"] = surrogate.name;
  rank_json["rows"] = shap.size();
  rank_json["background_rows"] = background.rows();
  rank_json["ranking"] = json::array();
  for (const auto& s : ranking.scores) {
    rank_json["ranking"].push_back(
        {{"feature", s.name}, {"index", s.index}, {"mean_abs_shap", s.mean_abs_shap}});
  }

  const fs::path dir = StageDir(c, "explain");
  xnet::WriteFileAtomic(dir / "shap.csv", shap_csv);
  xnet::WriteFileAtomic(dir / "shap_dependence.csv", dep_csv);
  xnet::WriteFileAtomic(dir / "pdp.csv", pdp_csv);
  xnet::WriteFileAtomic(dir / "ice.csv", ice_csv);
  WriteJson(dir / "ranking.json", rank_json);
  WriteJson(dir / "manifest.json", Manifest("explain", c, topology));
  log << "explain: mean |SHAP| ranking over " << shap.size() << " rows:";
  for (const auto& s : ranking.scores) log << " " << s.name << "=" << Fixed(s.mean_abs_shap);
  log << "\n";
}

namespace {

xnet::FeatureRanking LoadRanking(const RunConfig& c, const xnet::Topology& topology) {
  RequireStage(c, "explain", topology);
  const json j = ReadJson(c.out / "explain" / "ranking.json");
  xnet::FeatureRanking ranking;
  try {
    for (const json& e : j.at("ranking")) {
      ranking.scores.push_back({e.at("feature").get<std::string>(), e.at("index").get<int>(),
                                e.at("mean_abs_shap").get<double>()});
    }
  } catch (const json::exception& e) {
    Throw(ErrorKind::kValidation, std::string("ranking.json: ") + e.what());
  }
  return ranking;
}

}  // namespace

void CmdTune(const RunConfig& c, std::ostream& log) {
  const xnet::Topology topology = ResolveTopology(c);
  const auto tms = ResolveTraffic(c, topology);
  std::vector<xnet::RewardWeights> grid = xnet::WeightGrid(c.tuner_step);
  std::string provenance = "grid";
  if (c.tuner_prune) {
    grid = xnet::PruneByRanking(grid, LoadRanking(c, topology));
    provenance = "xai-pruned";
  }
  std::vector<xnet::WeightCandidate> candidates;
  for (const auto& w : grid) {
    candidates.push_back(
        {w, w == xnet::RewardWeights::Equal() ? "baseline" : provenance, {}});
  }
  const xnet::TuneResult result =
      xnet::Search(candidates, topology, tms, c.AgentParams(), c.tuner_k, c.warm_start);

  std::string csv = "rank,bwd,delay,pkloss,provenance,score";
  for (auto col : xnet::kMetricColumns) csv += "," + std::string(col);
  csv += "\n";
  for (std::size_t i = 0; i < result.ranking.size(); ++i) {
    const auto& rc = result.ranking[i];
    const auto& w = rc.candidate.weights;
    csv += std::to_string(i + 1) + "," + xnet::FormatDouble(w.bwd()) + "," +
           xnet::FormatDouble(w.delay()) + "," + xnet::FormatDouble(w.pkloss()) + "," +
           rc.candidate.provenance + "," + xnet::FormatDouble(rc.score);
    for (double v : rc.candidate.report.Overall()) csv += "," + xnet::FormatDouble(v);
    csv += "\n";
  }
  const fs::path dir = StageDir(c, "tune");
  WriteJson(dir / "tune_result.json", xnet::ToJson(result));
  xnet::WriteFileAtomic(dir / "ranking.csv", csv);
  json manifest = Manifest("tune", c, topology);
  json top = json::array();
  for (const auto& w : result.top) top.push_back(WeightsJson(w));
  manifest["top"] = top;
  WriteJson(dir / "manifest.json", manifest);
  log << "tune: " << result.ranking.size() << " candidates evaluated; top:";
  for (const auto& w : result.top) log << " " << w.ToString();
  log << "\n";
}

void CmdEval(const RunConfig& c, std::ostream& log) {
  const xnet::Topology topology = ResolveTopology(c);
  const auto tms = ResolveTraffic(c, topology);
  if (c.eval_weights.empty()) Throw(ErrorKind::kConfig, "no weights to evaluate");
  std::vector<xnet::EvalReport> reports;
  std::set<std::string> names;
  for (const auto& w : c.eval_weights) {
    xnet::EvalReport r =
        xnet::EvaluateWeights(w, topology, tms, c.AgentParams(), c.warm_start);
    r.name = WeightsSlug(w);
    if (!names.insert(r.name).second) continue;
    const auto o = r.Overall();
    log << "eval " << r.name << ": stretch " << Fixed(o[xnet::kStretch]) << ", delay "
        << Fixed(o[xnet::kMeanDelay]) << " ms, throughput " << Fixed(o[xnet::kThroughput])
        << " Mbps, loss " << Fixed(o[xnet::kLoss]) << "\n";
    reports.push_back(std::move(r));
  }
  const fs::path dir = StageDir(c, "eval");
  xnet::EmitReports(reports, dir);
  json comparisons = json::array();
  for (std::size_t i = 1; i < reports.size(); ++i) {
    const xnet::Comparison cmp = xnet::Compare(reports.front(), reports[i]);
    comparisons.push_back(xnet::ToJson(cmp));
    log << "eval " << reports[i].name << " vs " << reports.front().name
        << ": stretch " << Fixed(100.0 * cmp.overall_relative[xnet::kStretch], 2)
        << "% (shorter on " << cmp.wins[xnet::kStretch] << " of " << cmp.tags.size()
        << " TMs)\n";
  }
  WriteJson(dir / "comparison.json",
            {{"schema_version", xnet::kReportSchemaVersion}, {"comparisons", comparisons}});
  WriteJson(dir / "manifest.json", Manifest("eval", c, topology));
}

void CmdPipeline(const RunConfig& c, std::ostream& log) {
  CmdTrain(c, log);
  CmdDataset(c, log);
  CmdSurrogate(c, log);
  CmdExplain(c, log);
  CmdTune(c, log);
  CmdEval(c, log);
}

}  // namespace xnetctl
