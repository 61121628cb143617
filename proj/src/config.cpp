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

#include "docshift/config.hpp"

#include <cstdlib>

#include "docshift/dataset.hpp"
#include "docshift/errors.hpp"

#ifndef DOCSHIFT_DATA_DIR
#define DOCSHIFT_DATA_DIR "data"
#endif

namespace docshift {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string_view mask_name(MaskMethod m) { return m == MaskMethod::kOtsu ? "otsu" : "box"; }

MaskMethod parse_mask(std::string_view s) {
  if (s == "otsu") return MaskMethod::kOtsu;
  if (s == "box") return MaskMethod::kWholeBox;
  throw ParameterError("unknown mask method '" + std::string(s) + "' (otsu or box)");
}

// Rejects keys the defaults do not know about, so typos fail loudly.
void check_keys(const json& given, const json& known, const std::string& prefix) {
  for (const auto& [key, value] : given.items()) {
    const std::string path = prefix.empty() ? key : prefix + "." + key;
    if (!known.contains(key)) throw ParameterError("unknown config key '" + path + "'");
    if (value.is_object() && known[key].is_object()) check_keys(value, known[key], path);
  }
}

template <typename T>
T get(const json& j, const char* section, const char* key) {
  const json& v = section ? j.at(section).at(key) : j.at(key);
  try {
    return v.get<T>();
  } catch (const json::exception&) {
    throw ParameterError(std::string("config key '") + (section ? std::string(section) + "." : "") +
                         key + "' has the wrong type: " + v.dump());
  }
}

}  // namespace

fs::path default_homoglyph_table() {
  if (const char* dir = std::getenv("DOCSHIFT_DATA_DIR"); dir && *dir) {
    return fs::path(dir) / "homoglyphs.tsv";
  }
  return fs::path(DOCSHIFT_DATA_DIR) / "homoglyphs.tsv";
}

json default_config_json() { return config_to_json(PipelineConfig{}); }

json load_config_json(const fs::path& path) {
  json given;
  try {
    given = json::parse(read_text_file(path));
  } catch (const json::parse_error& e) {
    throw ParseError(path.string(), std::string("invalid config JSON: ") + e.what());
  }
  if (!given.is_object()) throw ParseError(path.string(), "config must be a JSON object");
  json merged = default_config_json();
  check_keys(given, merged, "");
  merged.merge_patch(given);
  return merged;
}

void apply_override(json& config, std::string_view dotted_key, std::string_view value) {
  json* node = &config;
  std::string key(dotted_key);
  std::size_t start = 0;
  for (;;) {
    const auto dot = key.find('.', start);
    const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (part.empty() || !node->is_object() || !node->contains(part)) {
      throw ParameterError("unknown config key '" + key + "'");
    }
    node = &(*node)[part];
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  if (node->is_object()) throw ParameterError("config key '" + key + "' is a section");
  json parsed;
  try {
    parsed = json::parse(value);
  } catch (const json::parse_error&) {
    parsed = std::string(value);
  }
  // Keep strings as strings even when they look like numbers.
  if (node->is_string()) parsed = std::string(value);
  *node = parsed;
}

json config_to_json(const PipelineConfig& cfg) {
  const ShiftSpec& s = cfg.shift;
  return json{
      {"task", std::string(task_name(cfg.task))},
      {"input", cfg.input},
      {"output", cfg.output},
      {"seed", cfg.seed},
      {"workers", cfg.workers},
      {"shift",
       {{"kind", std::string(shift_kind_name(s.kind))},
        {"lambda1", s.merge.lambda1},
        {"lambda2", s.merge.lambda2},
        {"mode", std::string(swap_mode_name(s.mode))},
        {"rate", s.rate},
        {"k", s.k},
        {"amplitude", s.amplitude},
        {"wavelength", s.wavelength},
        {"perspective", s.perspective},
        {"mask", std::string(mask_name(s.mask))},
        {"trials", s.trials},
        {"strength_threshold", s.strength_threshold},
        {"count", s.count}}},
      {"oracle",
       {{"predictor", cfg.oracle.predictor},
        {"masked_lm", cfg.oracle.masked_lm},
        {"timeout_ms", cfg.oracle.timeout_ms}}},
      {"resources",
       {{"embedding_table", cfg.resources.embedding_table},
        {"homoglyph_table", cfg.resources.homoglyph_table},
        {"natural_images", cfg.resources.natural_images},
        {"fields", cfg.resources.fields}}},
  };
}

PipelineConfig config_from_json(const json& given) {
  json j = default_config_json();
  check_keys(given, j, "");
  j.merge_patch(given);

  PipelineConfig cfg;
  cfg.task = parse_task(get<std::string>(j, nullptr, "task"));
  cfg.input = get<std::string>(j, nullptr, "input");
  cfg.output = get<std::string>(j, nullptr, "output");
  cfg.seed = get<std::uint64_t>(j, nullptr, "seed");
  cfg.workers = get<int>(j, nullptr, "workers");

  ShiftSpec& s = cfg.shift;
  s.kind = parse_shift_kind(get<std::string>(j, "shift", "kind"));
  s.merge.lambda1 = get<int>(j, "shift", "lambda1");
  s.merge.lambda2 = get<int>(j, "shift", "lambda2");
  s.mode = parse_swap_mode(get<std::string>(j, "shift", "mode"));
  s.rate = get<double>(j, "shift", "rate");
  s.k = get<int>(j, "shift", "k");
  s.amplitude = get<double>(j, "shift", "amplitude");
  s.wavelength = get<double>(j, "shift", "wavelength");
  s.perspective = get<double>(j, "shift", "perspective");
  s.mask = parse_mask(get<std::string>(j, "shift", "mask"));
  s.trials = get<int>(j, "shift", "trials");
  s.strength_threshold = get<double>(j, "shift", "strength_threshold");
  s.count = get<int>(j, "shift", "count");

  cfg.oracle.predictor = get<std::string>(j, "oracle", "predictor");
  cfg.oracle.masked_lm = get<std::string>(j, "oracle", "masked_lm");
  cfg.oracle.timeout_ms = get<int>(j, "oracle", "timeout_ms");

  cfg.resources.embedding_table = get<std::string>(j, "resources", "embedding_table");
  cfg.resources.homoglyph_table = get<std::string>(j, "resources", "homoglyph_table");
  cfg.resources.natural_images = get<std::string>(j, "resources", "natural_images");
  cfg.resources.fields = get<std::string>(j, "resources", "fields");

  if (cfg.workers < 1) throw ParameterError("workers must be at least 1");
  if (cfg.oracle.timeout_ms < 1) throw ParameterError("oracle.timeout_ms must be positive");
  if (s.merge.lambda1 < 0 || s.merge.lambda2 < 0) {
    throw ParameterError("shift.lambda1 and shift.lambda2 must be non-negative");
  }
  if (!(s.rate >= 0.0 && s.rate <= 1.0)) throw ParameterError("shift.rate must lie in [0, 1]");
  if (s.k < 1) throw ParameterError("shift.k must be at least 1");
  if (!(s.amplitude >= 0.0)) throw ParameterError("shift.amplitude must be non-negative");
  if (!(s.wavelength > 0.0)) throw ParameterError("shift.wavelength must be positive");
  if (!(s.perspective >= 0.0 && s.perspective < 0.25)) {
    throw ParameterError("shift.perspective must lie in [0, 0.25)");
  }
  if (s.trials < 1) throw ParameterError("shift.trials must be at least 1");
  if (!(s.strength_threshold >= 0.0 && s.strength_threshold <= 1.0)) {
    throw ParameterError("shift.strength_threshold must lie in [0, 1]");
  }
  if (s.count < 0) throw ParameterError("shift.count must be non-negative");
  if (s.kind == ShiftKind::kTextSwap && s.mode == SwapMode::kBertAttack) {
    throw ParameterError("masked-LM attacks use shift.kind=text_bert, not text_swap");
  }
  if (s.kind == ShiftKind::kTextBert) s.mode = SwapMode::kBertAttack;
  if (s.kind == ShiftKind::kTextBert && cfg.oracle.masked_lm.empty()) {
    throw ParameterError("text_bert needs oracle.masked_lm");
  }
  return cfg;
}

void check_config_paths(const PipelineConfig& cfg) {
  if (cfg.input.empty()) throw ParameterError("input path is not set");
  if (!fs::is_directory(cfg.input)) throw IoError("input dataset " + cfg.input + " does not exist");
  const ShiftSpec& s = cfg.shift;
  if (s.kind == ShiftKind::kTextSwap && s.mode == SwapMode::kEmbedding) {
    if (cfg.resources.embedding_table.empty()) {
      throw ParameterError("embedding swaps need resources.embedding_table");
    }
    if (!fs::is_regular_file(cfg.resources.embedding_table)) {
      throw IoError("embedding table " + cfg.resources.embedding_table + " does not exist");
    }
  }
  if (s.kind == ShiftKind::kTextSwap && s.mode == SwapMode::kHomoglyph) {
    const fs::path table = cfg.resources.homoglyph_table.empty()
                               ? default_homoglyph_table()
                               : fs::path(cfg.resources.homoglyph_table);
    if (!fs::is_regular_file(table)) throw IoError("homoglyph table " + table.string() + " does not exist");
  }
  if (s.kind == ShiftKind::kImageNatural) {
    if (cfg.resources.natural_images.empty()) {
      throw ParameterError("image_natural needs resources.natural_images");
    }
    if (!fs::is_directory(cfg.resources.natural_images)) {
      throw IoError("natural image pool " + cfg.resources.natural_images + " does not exist");
    }
  }
  if (s.kind == ShiftKind::kImageDistorted && !cfg.resources.fields.empty() &&
      !fs::is_directory(cfg.resources.fields)) {
    throw IoError("displacement field directory " + cfg.resources.fields + " does not exist");
  }
}

json shift_parameters(const PipelineConfig& cfg) {
  const ShiftSpec& s = cfg.shift;
  switch (s.kind) {
    case ShiftKind::kOriginal: return json::object();
    case ShiftKind::kImageNatural:
      return {{"mask", std::string(mask_name(s.mask))},
              {"natural_images", cfg.resources.natural_images}};
    case ShiftKind::kImageDistorted:
      if (!cfg.resources.fields.empty()) return {{"fields", cfg.resources.fields}};
      return {{"amplitude", s.amplitude},
              {"wavelength", s.wavelength},
              {"perspective", s.perspective}};
    case ShiftKind::kTextBert:
      return {{"mode", "bert_attack"}, {"rate", s.rate}, {"k", s.k}};
    case ShiftKind::kTextSwap: {
      json p = {{"mode", std::string(swap_mode_name(s.mode))}, {"rate", s.rate}};
      if (s.mode == SwapMode::kEmbedding) {
        p["k"] = s.k;
        p["embedding_table"] = cfg.resources.embedding_table;
      }
      if (s.mode == SwapMode::kHomoglyph) {
        p["homoglyph_table"] = cfg.resources.homoglyph_table.empty()
                                   ? std::string("(built-in)")
                                   : cfg.resources.homoglyph_table;
      }
      return p;
    }
    case ShiftKind::kLayoutMerge:
      return {{"lambda1", s.merge.lambda1}, {"lambda2", s.merge.lambda2}};
    case ShiftKind::kLayoutMove:
      return {{"trials", s.trials},
              {"strength_threshold", s.strength_threshold},
              {"count", s.count},
              {"strength_source", cfg.oracle.predictor.empty() ? "heuristic" : "oracle"}};
  }
  return json::object();
}

}  // namespace docshift
