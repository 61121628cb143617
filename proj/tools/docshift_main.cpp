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

// docshift: generate distribution-shifted document datasets and score
// predictions on them.
//
//   docshift shift    --config run.json [--shift layout_merge --lambda1 3 ...]
//   docshift validate DATASET [--task ie]
//   docshift stats    DATASET [--task ie] [--json]
//   docshift score    GOLD PREDICTIONS [--task ie] [--tau 0.5] [--report out.json]
//   docshift replay   MANIFEST --output DIR
//
// Any config field can also be set with a dotted flag, e.g.
// --shift.lambda1=3 or --oracle.timeout_ms 5000.

#include <algorithm>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "json.hpp"

#include "docshift/config.hpp"
#include "docshift/dataset.hpp"
#include "docshift/errors.hpp"
#include "docshift/pipeline.hpp"

namespace {

using docshift::Task;
using nlohmann::json;

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("docshift");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%l] %v");
  spdlog::set_level(spdlog::level::info);
  if (const char* level = std::getenv("DOCSHIFT_LOG"); level && *level) {
    spdlog::set_level(spdlog::level::from_str(level));
  }
}

// Pulls "--a.b=value" and "--a.b value" pairs out of argv.
std::vector<std::pair<std::string, std::string>> extract_dotted(std::vector<std::string>& args) {
  std::vector<std::pair<std::string, std::string>> found;
  std::vector<std::string> rest;
  for (std::size_t i = 0; i < args.size(); ++i) {
    const std::string& a = args[i];
    if (a.rfind("--", 0) == 0) {
      const auto eq = a.find('=');
      const std::string flag = a.substr(2, eq == std::string::npos ? std::string::npos : eq - 2);
      if (flag.find('.') != std::string::npos) {
        if (eq != std::string::npos) {
          found.emplace_back(flag, a.substr(eq + 1));
        } else if (i + 1 < args.size()) {
          found.emplace_back(flag, args[++i]);
        } else {
          throw docshift::ParameterError("flag --" + flag + " needs a value");
        }
        continue;
      }
    }
    rest.push_back(a);
  }
  args = std::move(rest);
  return found;
}

Task task_option(const std::string& name) { return docshift::parse_task(name); }

int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  auto dotted = extract_dotted(args);

  CLI::App app{"Out-of-distribution document dataset generation and scoring", "docshift"};
  app.require_subcommand(1);
  app.set_version_flag("--version", docshift::kToolkitVersion);

  // shift
  auto* shift = app.add_subcommand("shift", "apply a distribution shift to a dataset");
  std::string config_path;
  std::vector<std::pair<std::string, std::string>> named;
  auto flag = [&](CLI::App* sub, const std::string& name, const std::string& key,
                  const std::string& help) {
    sub->add_option_function<std::string>(
        "--" + name, [&named, key](const std::string& v) { named.emplace_back(key, v); }, help);
  };
  shift->add_option("--config", config_path, "JSON config file");
  flag(shift, "input", "input", "input dataset directory");
  flag(shift, "output", "output", "output dataset directory");
  flag(shift, "task", "task", "ie, classification or vqa");
  flag(shift, "seed", "seed", "master seed");
  flag(shift, "workers", "workers", "worker threads");
  flag(shift, "shift", "shift.kind",
       "original, image_natural, image_distorted, text_bert, text_swap, layout_merge, layout_move");
  flag(shift, "mode", "shift.mode", "swap mode: embedding, homoglyph, number, char_delete");
  flag(shift, "lambda1", "shift.lambda1", "horizontal dilation (px)");
  flag(shift, "lambda2", "shift.lambda2", "vertical dilation (px)");
  flag(shift, "rate", "shift.rate", "fraction of eligible words to perturb");
  flag(shift, "k", "shift.k", "neighbor / candidate count");
  flag(shift, "amplitude", "shift.amplitude", "warp amplitude (px)");
  flag(shift, "wavelength", "shift.wavelength", "warp wavelength (px)");
  flag(shift, "trials", "shift.trials", "semantic-strength trials");
  flag(shift, "strength-threshold", "shift.strength_threshold", "minimum strength to move");
  std::string oracle;
  shift->add_option("--oracle", oracle, "oracle address (exec:<cmd> or tcp:<host>:<port>)");
  bool force = false;
  shift->add_flag("--force", force, "replace a previous run in the output directory");

  // validate
  auto* validate = app.add_subcommand("validate", "check a dataset for schema and box violations");
  std::string dataset_path;
  std::string task_name = "ie";
  validate->add_option("dataset", dataset_path, "dataset directory")->required();
  validate->add_option("--task", task_name, "ie, classification or vqa");

  // stats
  auto* stats = app.add_subcommand("stats", "count documents, entities, words and labels");
  bool as_json = false;
  stats->add_option("dataset", dataset_path, "dataset directory")->required();
  stats->add_option("--task", task_name, "ie, classification or vqa");
  stats->add_flag("--json", as_json, "print JSON");

  // score
  auto* score = app.add_subcommand("score", "score a prediction file against gold data");
  std::string gold_path, pred_path, report_path;
  double tau = docshift::kDefaultAnlsThreshold;
  score->add_option("gold", gold_path, "gold dataset directory")->required();
  score->add_option("predictions", pred_path, "prediction JSONL file")->required();
  score->add_option("--task", task_name, "ie, classification or vqa");
  score->add_option("--tau", tau, "ANLS threshold")->check(CLI::Range(0.0, 1.0));
  score->add_option("--report", report_path, "machine-readable report path");

  // replay
  auto* replay = app.add_subcommand("replay", "re-run a manifest and compare output digests");
  std::string manifest_path, replay_output, replay_input;
  int replay_workers = 1;
  replay->add_option("manifest", manifest_path, "manifest.json of a previous run")->required();
  replay->add_option("--output", replay_output, "output directory")->required();
  replay->add_option("--input", replay_input, "input dataset (defaults to the recorded path)");
  replay->add_option("--workers", replay_workers, "worker threads")->check(CLI::PositiveNumber);
  replay->add_flag("--force", force, "replace a previous run in the output directory");

  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  if (*shift) {
    json cj = config_path.empty() ? docshift::default_config_json()
                                  : docshift::load_config_json(config_path);
    for (const auto& [k, v] : named) docshift::apply_override(cj, k, v);
    for (const auto& [k, v] : dotted) docshift::apply_override(cj, k, v);
    if (!oracle.empty()) {
      const std::string kind = cj["shift"]["kind"].get<std::string>();
      docshift::apply_override(cj, kind == "text_bert" ? "oracle.masked_lm" : "oracle.predictor",
                               oracle);
    }
    const auto cfg = docshift::config_from_json(cj);
    const auto result = docshift::run_shift(cfg, {force, {}});
    std::cout << "documents: " << result.documents << "  failed: " << result.failed
              << "  unshifted: " << result.unshifted << "\n"
              << "output digest: " << result.manifest["output_digest"].get<std::string>() << "\n";
    return result.failed == 0 ? 0 : 1;
  }
  if (!dotted.empty()) throw docshift::ParameterError("dotted config flags only apply to 'shift'");

  if (*validate) {
    const auto report = docshift::validate_dataset(dataset_path, task_option(task_name));
    for (const auto& v : report.violations) std::cout << v.file << ": " << v.message << "\n";
    std::cout << report.documents << " document(s), " << report.violations.size()
              << " violation(s)\n";
    return report.valid() ? 0 : 1;
  }
  if (*stats) {
    const auto s = docshift::dataset_stats(docshift::load_dataset(dataset_path, task_option(task_name)));
    if (as_json) {
      std::cout << docshift::stats_json(s).dump(2) << "\n";
    } else {
      std::cout << "documents " << s.documents << "\nentities  " << s.entities << "\nwords     "
                << s.words << "\n";
      for (const auto& [label, n] : s.labels) std::cout << "  " << label << " " << n << "\n";
    }
    return 0;
  }
  if (*score) {
    const Task task = task_option(task_name);
    docshift::ScoreReport report;
    try {
      report = docshift::score_files(gold_path, pred_path, task, tau);
    } catch (const docshift::AlignmentError& e) {
      std::cerr << e.what() << "\n";
      return 1;
    }
    std::cout << docshift::render_report(report, task);
    const json record = docshift::report_json(report, task, tau);
    const std::string out = report_path.empty() ? pred_path + ".score.json" : report_path;
    docshift::write_text_file(out, record.dump(2) + "\n");
    return 0;
  }
  if (*replay) {
    std::optional<std::string> input;
    if (!replay_input.empty()) input = replay_input;
    const auto r = docshift::replay(manifest_path, replay_output, input, replay_workers, {force, {}});
    std::cout << "expected " << r.expected_output_digest << "\nactual   " << r.actual_output_digest
              << "\n"
              << (r.output_matches ? "replay reproduced the recorded output"
                                   : "replay DIFFERS from the recorded output")
              << "\n";
    return r.output_matches ? 0 : 1;
  }
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  try {
    return run(argc, argv);
  } catch (const docshift::ParameterError& e) {
    spdlog::error("{}", e.what());
    return 2;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 1;
  }
}
