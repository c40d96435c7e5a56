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

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace xnet {

/// Error categories. They double as the machine-parsable error classes the
/// CLI prints, so the spelling of `ToString` is part of the interface.
enum class ErrorKind {
  kParse,
  kValidation,
  kConfig,
  kStageInputMissing,
  kRuntime,
};

std::string_view ToString(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void Throw(ErrorKind kind, const std::string& message);

// ---------------------------------------------------------------------------
// Randomness
// ---------------------------------------------------------------------------

/// splitmix64 finalizer; used to derive independent stream seeds.
std::uint64_t MixSeed(std::uint64_t seed, std::uint64_t stream);

/// Seeded generator with distribution helpers that do not depend on the
/// standard library's (implementation-defined) distribution algorithms, so
/// results are reproducible across toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1).
  double Uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }

  /// Uniform integer in [0, n). n must be > 0.
  std::uint64_t Index(std::uint64_t n);

  template <typename T>
  void Shuffle(std::vector<T>& values) {
    for (std::size_t i = values.size(); i > 1; --i) {
      std::swap(values[i - 1], values[Index(i)]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

// ---------------------------------------------------------------------------
// Parallelism
// ---------------------------------------------------------------------------

/// Worker cap from XNET_THREADS (default: hardware concurrency, at least 1).
int WorkerCount();

/// Runs body(i) for i in [0, n) over up to WorkerCount() threads. Each index is
/// executed exactly once; callers write results to per-index slots.
void ParallelFor(std::size_t n, const std::function<void(std::size_t)>& body);

// ---------------------------------------------------------------------------
// Text IO helpers
// ---------------------------------------------------------------------------

std::string ReadFile(const std::filesystem::path& path);

/// Writes through a temporary sibling file and renames it into place.
void WriteFileAtomic(const std::filesystem::path& path,
                     std::string_view contents);

/// Splits one CSV line on commas. No quoting support; none of the formats here
/// need it.
std::vector<std::string> SplitCsvLine(std::string_view line);

/// Splits text into lines, dropping '\r' and a trailing empty line.
std::vector<std::string> SplitLines(std::string_view text);

std::string Trim(std::string_view s);

/// Strict double parse: the whole (trimmed) field must be consumed.
double ParseDouble(std::string_view field, const std::string& context);

/// Shortest decimal form that round-trips to the same double.
std::string FormatDouble(double value);

/// FNV-1a 64-bit, rendered as 16 hex digits.
std::string Fnv1aHex(std::string_view data);

}  // namespace xnet
