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

#include "xnet/datakit.hpp"

#include <algorithm>
#include <array>
#include <unordered_map>
#include <cmath>
#include <cstring>
#include <numeric>
#include <unordered_set>

namespace xnet {
namespace {

constexpr int kDatasetSchemaVersion = 1;
constexpr const char* kDatasetHeader =
    "src,dst,src_enc,dst_enc,bwd_hat,delay_hat,pkloss_hat,qvalue";

bool SameCell(double a, double b) {
  if (std::isnan(a) && std::isnan(b)) return true;
  return a == b;
}

std::array<double*, 4> Cells(RawSample& s) {
  return {&s.bwd_hat, &s.delay_hat, &s.pkloss_hat, &s.qvalue};
}

constexpr const char* kCellNames[4] = {"bwd_hat", "delay_hat", "pkloss_hat",
                                       "qvalue"};

std::uint64_t HashSample(const RawSample& s) {
  std::uint64_t h = std::hash<std::string>{}(s.src);
  h = h * 1000003u ^ std::hash<std::string>{}(s.dst);
  for (double v : {s.bwd_hat, s.delay_hat, s.pkloss_hat, s.qvalue}) {
    std::uint64_t bits = 0;
    if (std::isnan(v)) {
      bits = 0x7ff8000000000000ULL;
    } else {
      if (v == 0.0) v = 0.0;  // fold -0 into +0
      std::memcpy(&bits, &v, sizeof(bits));
    }
    h = h * 1000003u ^ bits;
  }
  return h;
}

nlohmann::json EncoderToJson(const TargetEncoder& enc) {
  nlohmann::json cats = nlohmann::json::object();
  for (const auto& [name, e] : enc.table) {
    cats[name] = {{"count", e.count}, {"mean", e.mean}, {"encoding", e.encoding}};
  }
  return {{"smoothing", enc.smoothing}, {"prior", enc.prior}, {"categories", cats}};
}

TargetEncoder EncoderFromJson(const nlohmann::json& j) {
  TargetEncoder enc;
  enc.smoothing = j.at("smoothing").get<double>();
  enc.prior = j.at("prior").get<double>();
  for (const auto& [name, e] : j.at("categories").items()) {
    enc.table[name] = {e.at("count").get<std::size_t>(),
                       e.at("mean").get<double>(),
                       e.at("encoding").get<double>()};
  }
  return enc;
}

}  // namespace

bool SameSample(const RawSample& a, const RawSample& b) {
  return a.src == b.src && a.dst == b.dst && SameCell(a.bwd_hat, b.bwd_hat) &&
         SameCell(a.delay_hat, b.delay_hat) &&
         SameCell(a.pkloss_hat, b.pkloss_hat) && SameCell(a.qvalue, b.qvalue);
}

double TargetEncoder::Encode(const std::string& category) const {
  const auto it = table.find(category);
  return it == table.end() ? prior : it->second.encoding;
}

Dataset Dataset::Subset(const std::vector<Eigen::Index>& rows) const {
  Dataset out;
  out.src_encoder = src_encoder;
  out.dst_encoder = dst_encoder;
  out.band = band;
  out.provenance = provenance;
  out.features.resize(static_cast<Eigen::Index>(rows.size()), kNumFeatures);
  out.target.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const Eigen::Index r = rows[i];
    out.src.push_back(src[r]);
    out.dst.push_back(dst[r]);
    out.features.row(static_cast<Eigen::Index>(i)) = features.row(r);
    out.target[static_cast<Eigen::Index>(i)] = target[r];
  }
  return out;
}

std::vector<RawSample> Dataset::ToRawSamples() const {
  std::vector<RawSample> out;
  out.reserve(static_cast<std::size_t>(rows()));
  for (Eigen::Index i = 0; i < rows(); ++i) {
    out.push_back({src[i], dst[i], features(i, 2), features(i, 3),
                   features(i, 4), target[i]});
  }
  return out;
}

std::vector<RawSample> ExtractSamples(const Topology& topology,
                                      const QTables& tables,
                                      const NormalizedMetrics& metrics) {
  if (metrics.rows() != topology.num_arcs()) {
    Throw(ErrorKind::kValidation,
          "extract_samples: metrics missing for some links (" +
              std::to_string(metrics.rows()) + " rows for " +
              std::to_string(topology.num_arcs()) + " links)");
  }
  if (static_cast<int>(tables.values.size()) != topology.num_nodes()) {
    Throw(ErrorKind::kValidation, "extract_samples: tables do not match topology");
  }
  std::vector<RawSample> out;
  for (NodeIndex d = 0; d < topology.num_nodes(); ++d) {
    for (ArcIndex a = 0; a < topology.num_arcs(); ++a) {
      const Arc& arc = topology.arcs()[a];
      if (arc.src == d) continue;
      out.push_back({topology.name(arc.src), topology.name(d), metrics(a, kBwd),
                     metrics(a, kDelay), metrics(a, kPkloss),
                     tables.values[d][a]});
    }
  }
  return out;
}

std::vector<RawSample> Dedupe(const std::vector<RawSample>& rows) {
  std::unordered_multimap<std::uint64_t, std::size_t> seen;
  std::vector<RawSample> out;
  out.reserve(rows.size());
  for (const RawSample& row : rows) {
    const std::uint64_t h = HashSample(row);
    const auto [lo, hi] = seen.equal_range(h);
    bool dup = false;
    for (auto it = lo; it != hi && !dup; ++it) {
      dup = SameSample(out[it->second], row);
    }
    if (dup) continue;
    seen.emplace(h, out.size());
    out.push_back(row);
  }
  return out;
}

double Quantile(std::vector<double> values, double p) {
  if (values.empty()) Throw(ErrorKind::kValidation, "quantile of empty set");
  std::sort(values.begin(), values.end());
  const double pos = p * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

std::vector<RawSample> Impute(const std::vector<RawSample>& rows) {
  std::vector<RawSample> out = rows;
  for (int c = 0; c < 4; ++c) {
    std::vector<double> present;
    bool any_missing = false;
    for (RawSample& s : out) {
      const double v = *Cells(s)[c];
      if (std::isnan(v)) {
        any_missing = true;
      } else {
        present.push_back(v);
      }
    }
    if (!any_missing) continue;
    if (present.empty()) {
      Throw(ErrorKind::kValidation, std::string("impute: column ") +
                                        kCellNames[c] + " is entirely missing");
    }
    const double median = Quantile(std::move(present), 0.5);
    for (RawSample& s : out) {
      if (std::isnan(*Cells(s)[c])) *Cells(s)[c] = median;
    }
  }
  return out;
}

std::pair<Eigen::VectorXd, IqrBand> IqrClip(const Eigen::VectorXd& targets,
                                            double k) {
  if (targets.size() == 0) Throw(ErrorKind::kValidation, "iqr_clip: no values");
  std::vector<double> values(targets.data(), targets.data() + targets.size());
  IqrBand band;
  band.k = k;
  band.q1 = Quantile(values, 0.25);
  band.q3 = Quantile(values, 0.75);
  const double iqr = band.q3 - band.q1;
  band.lower = band.q1 - k * iqr;
  band.upper = band.q3 + k * iqr;
  Eigen::VectorXd clipped = targets.cwiseMax(band.lower).cwiseMin(band.upper);
  return {std::move(clipped), band};
}

TargetEncoder FitTargetEncoder(const std::vector<std::string>& categories,
                               const Eigen::VectorXd& targets,
                               double smoothing) {
  if (static_cast<Eigen::Index>(categories.size()) != targets.size()) {
    Throw(ErrorKind::kValidation, "target encoder: size mismatch");
  }
  if (targets.size() == 0) {
    Throw(ErrorKind::kValidation, "target encoder: no rows");
  }
  TargetEncoder enc;
  enc.smoothing = smoothing;
  enc.prior = targets.mean();
  std::map<std::string, double> sums;
  for (std::size_t i = 0; i < categories.size(); ++i) {
    sums[categories[i]] += targets[static_cast<Eigen::Index>(i)];
    ++enc.table[categories[i]].count;
  }
  for (auto& [name, e] : enc.table) {
    const double n = static_cast<double>(e.count);
    e.mean = sums[name] / n;
    e.encoding = (n * e.mean + smoothing * enc.prior) / (n + smoothing);
  }
  return enc;
}

Dataset Preprocess(const std::vector<RawSample>& raw) {
  if (raw.empty()) Throw(ErrorKind::kValidation, "preprocess: empty input");
  std::vector<RawSample> rows = Impute(Dedupe(raw));
  Eigen::VectorXd q(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    q[static_cast<Eigen::Index>(i)] = rows[i].qvalue;
  }
  auto [clipped, band] = IqrClip(q);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    rows[i].qvalue = clipped[static_cast<Eigen::Index>(i)];
  }
  // Clipping can collapse rows that differed only in an outlying target.
  rows = Dedupe(rows);

  Dataset data;
  data.band = band;
  const auto n = static_cast<Eigen::Index>(rows.size());
  data.target.resize(n);
  for (const RawSample& s : rows) {
    data.src.push_back(s.src);
    data.dst.push_back(s.dst);
  }
  for (Eigen::Index i = 0; i < n; ++i) data.target[i] = rows[i].qvalue;
  data.src_encoder = FitTargetEncoder(data.src, data.target);
  data.dst_encoder = FitTargetEncoder(data.dst, data.target);
  data.features.resize(n, kNumFeatures);
  for (Eigen::Index i = 0; i < n; ++i) {
    const RawSample& s = rows[static_cast<std::size_t>(i)];
    data.features.row(i) << data.src_encoder.Encode(s.src),
        data.dst_encoder.Encode(s.dst), s.bwd_hat, s.delay_hat, s.pkloss_hat;
  }
  return data;
}

std::pair<Dataset, Dataset> Split(const Dataset& data, double test_frac,
                                  std::uint64_t seed) {
  if (!(test_frac >= 0.0 && test_frac <= 1.0)) {
    Throw(ErrorKind::kValidation, "split: test_frac must be in [0,1]");
  }
  std::vector<Eigen::Index> order(static_cast<std::size_t>(data.rows()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  Rng rng(MixSeed(seed, 0));
  rng.Shuffle(order);
  const auto n_test = static_cast<std::size_t>(
      std::llround(static_cast<double>(order.size()) * test_frac));
  std::vector<Eigen::Index> test(order.begin(), order.begin() + n_test);
  std::vector<Eigen::Index> train(order.begin() + n_test, order.end());
  return {data.Subset(train), data.Subset(test)};
}

std::string WriteDatasetCsv(const Dataset& data) {
  std::string out = std::string(kDatasetHeader) + "\n";
  for (Eigen::Index i = 0; i < data.rows(); ++i) {
    out += data.src[i] + "," + data.dst[i];
    for (int c = 0; c < kNumFeatures; ++c) {
      out += "," + FormatDouble(data.features(i, c));
    }
    out += "," + FormatDouble(data.target[i]) + "\n";
  }
  return out;
}

nlohmann::json DatasetMetadata(const Dataset& data) {
  nlohmann::json j;
  j["schema_version"] = kDatasetSchemaVersion;
  j["rows"] = data.rows();
  j["columns"] = nlohmann::json::array();
  for (const char* name : kFeatureNames) j["columns"].push_back(name);
  j["target"] = "qvalue";
  j["iqr_band"] = {{"q1", data.band.q1},
                   {"q3", data.band.q3},
                   {"lower", data.band.lower},
                   {"upper", data.band.upper},
                   {"k", data.band.k}};
  j["encoders"] = {{"src", EncoderToJson(data.src_encoder)},
                   {"dst", EncoderToJson(data.dst_encoder)}};
  j["provenance"] = data.provenance;
  return j;
}

std::filesystem::path SidecarPath(const std::filesystem::path& csv_path) {
  std::filesystem::path p = csv_path;
  p.replace_extension(".meta.json");
  return p;
}

void WriteDataset(const Dataset& data, const std::filesystem::path& path) {
  WriteFileAtomic(path, WriteDatasetCsv(data));
  WriteFileAtomic(SidecarPath(path), DatasetMetadata(data).dump(2) + "\n");
}

Dataset ParseDataset(std::string_view csv, const nlohmann::json& metadata) {
  if (metadata.value("schema_version", 0) != kDatasetSchemaVersion) {
    Throw(ErrorKind::kParse, "dataset metadata: unsupported schema_version");
  }
  const auto lines = SplitLines(csv);
  if (lines.empty() || Trim(lines[0]) != kDatasetHeader) {
    Throw(ErrorKind::kParse, "dataset: bad header");
  }
  Dataset data;
  std::vector<std::array<double, kNumFeatures + 1>> values;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const std::string where = "dataset line " + std::to_string(i + 1);
    const auto f = SplitCsvLine(lines[i]);
    if (f.size() != kNumFeatures + 3) {
      Throw(ErrorKind::kParse, where + ": expected " +
                                   std::to_string(kNumFeatures + 3) +
                                   " fields, got " + std::to_string(f.size()));
    }
    data.src.push_back(f[0]);
    data.dst.push_back(f[1]);
    std::array<double, kNumFeatures + 1> row{};
    for (int c = 0; c <= kNumFeatures; ++c) row[c] = ParseDouble(f[c + 2], where);
    values.push_back(row);
  }
  const auto n = static_cast<Eigen::Index>(values.size());
  if (metadata.at("rows").get<Eigen::Index>() != n) {
    Throw(ErrorKind::kParse, "dataset: expected " +
                                 std::to_string(metadata.at("rows").get<long>()) +
                                 " rows, found " + std::to_string(n) +
                                 " (truncated file?)");
  }
  data.features.resize(n, kNumFeatures);
  data.target.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (int c = 0; c < kNumFeatures; ++c) data.features(i, c) = values[i][c];
    data.target[i] = values[i][kNumFeatures];
  }
  const auto& band = metadata.at("iqr_band");
  data.band = {band.at("q1").get<double>(), band.at("q3").get<double>(),
               band.at("lower").get<double>(), band.at("upper").get<double>(),
               band.at("k").get<double>()};
  data.src_encoder = EncoderFromJson(metadata.at("encoders").at("src"));
  data.dst_encoder = EncoderFromJson(metadata.at("encoders").at("dst"));
  data.provenance = metadata.at("provenance");
  return data;
}

Dataset ReadDataset(const std::filesystem::path& path) {
  const std::filesystem::path sidecar = SidecarPath(path);
  nlohmann::json meta;
  try {
    meta = nlohmann::json::parse(ReadFile(sidecar));
  } catch (const nlohmann::json::exception& e) {
    Throw(ErrorKind::kParse, sidecar.string() + ": " + e.what());
  }
  try {
    return ParseDataset(ReadFile(path), meta);
  } catch (const nlohmann::json::exception& e) {
    Throw(ErrorKind::kParse, sidecar.string() + ": " + e.what());
  }
}

}  // namespace xnet
