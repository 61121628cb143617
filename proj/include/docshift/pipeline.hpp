// Copyright 2026 The docshift Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DOCSHIFT_PIPELINE_HPP_
#define DOCSHIFT_PIPELINE_HPP_

#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "docshift/config.hpp"
#include "docshift/metrics.hpp"
#include "docshift/oracle.hpp"

namespace docshift {

inline constexpr const char* kToolkitVersion = "0.1.0";
inline constexpr const char* kManifestFile = "manifest.json";

// Builds one oracle connection per worker. Unset members fall back to the
// addresses in the config.
struct OracleFactory {
  std::function<std::unique_ptr<PredictionOracle>()> predictor;
  std::function<std::unique_ptr<MaskedLmOracle>()> masked_lm;
};

struct RunOptions {
  // Clears toolkit-owned entries of a non-empty output directory.
  bool force = false;
  OracleFactory oracles;
};

struct ShiftRunResult {
  nlohmann::json manifest;
  std::size_t documents = 0;
  std::size_t failed = 0;
  std::size_t unshifted = 0;
};

// Transforms every document of cfg.input into cfg.output and writes the
// manifest next to it. Per-document failures are logged, flagged in the
// manifest and skipped; the caller decides the exit status from `failed`.
ShiftRunResult run_shift(const PipelineConfig& cfg, const RunOptions& options = {});

struct ReplayResult {
  bool input_matches = false;
  bool output_matches = false;
  std::string expected_output_digest;
  std::string actual_output_digest;
};

// Re-runs the configuration recorded in a manifest into `output` and
// compares digests. `input` overrides the recorded input path.
ReplayResult replay(const std::filesystem::path& manifest_path,
                    const std::filesystem::path& output,
                    const std::optional<std::string>& input, int workers,
                    const RunOptions& options = {});

struct Violation {
  std::string file;
  std::string message;
};

struct ValidationReport {
  std::size_t documents = 0;
  std::vector<Violation> violations;
  bool valid() const { return violations.empty(); }
};

ValidationReport validate_dataset(const std::filesystem::path& root, Task task);

// Loads gold data and predictions, validates alignment and scores. Throws
// AlignmentError listing every alignment problem.
ScoreReport score_files(const std::filesystem::path& gold, const std::filesystem::path& predictions,
                        Task task, double tau);
std::string render_report(const ScoreReport& report, Task task);
nlohmann::json report_json(const ScoreReport& report, Task task, double tau);

nlohmann::json stats_json(const DatasetStats& stats);

}  // namespace docshift

#endif  // DOCSHIFT_PIPELINE_HPP_
