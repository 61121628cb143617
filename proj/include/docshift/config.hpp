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

#ifndef DOCSHIFT_CONFIG_HPP_
#define DOCSHIFT_CONFIG_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "json.hpp"

#include "docshift/document.hpp"
#include "docshift/image_shift.hpp"
#include "docshift/layout_shift.hpp"
#include "docshift/text_shift.hpp"

namespace docshift {

struct ShiftSpec {
  ShiftKind kind = ShiftKind::kOriginal;
  // layout_merge
  MergeParams merge;
  // text_swap / text_bert
  SwapMode mode = SwapMode::kCharDelete;
  double rate = 0.15;
  int k = 8;
  // image_distorted
  double amplitude = 6.0;
  double wavelength = 240.0;
  double perspective = 0.02;
  // image_natural
  MaskMethod mask = MaskMethod::kOtsu;
  // layout_move
  int trials = kDefaultStrengthTrials;
  double strength_threshold = kDefaultStrengthThreshold;
  int count = 1;
};

struct OracleSpec {
  std::string predictor;  // prediction oracle address, empty = heuristic
  std::string masked_lm;  // masked-LM oracle address
  int timeout_ms = 30000;
};

struct ResourceSpec {
  std::string embedding_table;
  std::string homoglyph_table;
  std::string natural_images;  // directory
  std::string fields;          // optional directory of <id>.dfld files
};

struct PipelineConfig {
  Task task = Task::kIe;
  std::string input;
  std::string output;
  std::uint64_t seed = 0;
  int workers = 1;
  ShiftSpec shift;
  OracleSpec oracle;
  ResourceSpec resources;
};

// Config documents are JSON objects mirroring PipelineConfig:
//
//   {"task": "ie", "input": "funsd/test", "output": "out", "seed": 7,
//    "workers": 4,
//    "shift": {"kind": "layout_merge", "lambda1": 3, "lambda2": 1},
//    "oracle": {"predictor": "exec:python3 serve.py", "timeout_ms": 30000},
//    "resources": {"homoglyph_table": "data/homoglyphs.tsv"}}
//
// Missing fields take their defaults.
nlohmann::json default_config_json();
nlohmann::json load_config_json(const std::filesystem::path& path);

// Sets a dotted key such as "shift.lambda1". The value is read as JSON when
// it parses (numbers, booleans) and as a plain string otherwise.
void apply_override(nlohmann::json& config, std::string_view dotted_key, std::string_view value);

// Converts and checks ranges and kind/parameter consistency.
PipelineConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const PipelineConfig& cfg);

// Checks that every path the configured shift needs exists.
void check_config_paths(const PipelineConfig& cfg);

// Parameters relevant to the configured shift kind only.
nlohmann::json shift_parameters(const PipelineConfig& cfg);

// Default homoglyph table shipped with the toolkit.
std::filesystem::path default_homoglyph_table();

}  // namespace docshift

#endif  // DOCSHIFT_CONFIG_HPP_
