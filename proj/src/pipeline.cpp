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

#include "docshift/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <set>
#include <sstream>
#include <thread>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "docshift/annotation.hpp"
#include "docshift/dataset.hpp"
#include "docshift/digest.hpp"
#include "docshift/errors.hpp"
#include "docshift/image.hpp"
#include "docshift/image_shift.hpp"
#include "docshift/layout_shift.hpp"
#include "docshift/rng.hpp"
#include "docshift/text_shift.hpp"

namespace docshift {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json box_json(const BoundingBox& b) { return json::array({b.x1, b.y1, b.x2, b.y2}); }

// Read-only resources shared by all workers.
struct SharedResources {
  std::optional<EmbeddingTable> embeddings;
  std::optional<HomoglyphTable> homoglyphs;
  std::vector<fs::path> natural_pool;
};

SharedResources load_resources(const PipelineConfig& cfg) {
  SharedResources r;
  const ShiftSpec& s = cfg.shift;
  if (s.kind == ShiftKind::kTextSwap && s.mode == SwapMode::kEmbedding) {
    r.embeddings = EmbeddingTable::load(cfg.resources.embedding_table);
  }
  if (s.kind == ShiftKind::kTextSwap && s.mode == SwapMode::kHomoglyph) {
    r.homoglyphs = HomoglyphTable::load(cfg.resources.homoglyph_table.empty()
                                            ? default_homoglyph_table()
                                            : fs::path(cfg.resources.homoglyph_table));
  }
  if (s.kind == ShiftKind::kImageNatural) {
    for (const auto& e : fs::directory_iterator(cfg.resources.natural_images)) {
      if (!e.is_regular_file()) continue;
      const auto ext = e.path().extension().string();
      static const std::set<std::string> kExt = {".png", ".jpg", ".jpeg", ".bmp", ".tif",
                                                 ".tiff", ".PNG", ".JPG", ".JPEG"};
      if (kExt.count(ext)) r.natural_pool.push_back(e.path());
    }
    std::sort(r.natural_pool.begin(), r.natural_pool.end());
    if (r.natural_pool.empty()) {
      throw IoError("natural image pool " + cfg.resources.natural_images + " has no images");
    }
  }
  return r;
}

// Per-worker oracle connections, opened on first use.
class WorkerOracles {
 public:
  WorkerOracles(const PipelineConfig& cfg, const OracleFactory& factory)
      : cfg_(cfg), factory_(factory) {}

  PredictionOracle& predictor() {
    if (!predictor_) {
      predictor_ = factory_.predictor
                       ? factory_.predictor()
                       : std::make_unique<WirePredictionOracle>(
                             open_channel(cfg_.oracle.predictor),
                             std::chrono::milliseconds(cfg_.oracle.timeout_ms));
    }
    return *predictor_;
  }
  bool has_predictor() const { return factory_.predictor || !cfg_.oracle.predictor.empty(); }

  MaskedLmOracle& masked_lm() {
    if (!masked_lm_) {
      masked_lm_ = factory_.masked_lm
                       ? factory_.masked_lm()
                       : std::make_unique<WireMaskedLmOracle>(
                             open_channel(cfg_.oracle.masked_lm),
                             std::chrono::milliseconds(cfg_.oracle.timeout_ms));
    }
    return *masked_lm_;
  }

 private:
  const PipelineConfig& cfg_;
  const OracleFactory& factory_;
  std::unique_ptr<PredictionOracle> predictor_;
  std::unique_ptr<MaskedLmOracle> masked_lm_;
};

struct ItemOutcome {
  json record;
  std::optional<Document> document;
  bool failed = false;
  bool unshifted = false;
};

void copy_into(const fs::path& from, const fs::path& to) {
  fs::create_directories(to.parent_path());
  fs::copy_file(from, to, fs::copy_options::overwrite_existing);
}

json text_changes(const TextShiftOutcome& t) {
  json changes = json::array();
  for (const auto& c : t.changes) {
    changes.push_back({{"word_index", c.word_index},
                       {"entity_id", c.entity_id},
                       {"before", c.before},
                       {"after", c.after}});
  }
  return changes;
}

void refit_entities(Document& doc) {
  for (auto& e : doc.entities) {
    if (e.words.empty()) continue;
    BoundingBox hull = e.words.front().box;
    for (const auto& w : e.words) hull = hull.united(w.box);
    e.box = hull;
  }
}

ItemOutcome process(const PipelineConfig& cfg, const DatasetIndex& index,
                    const DocumentSource& src, const SharedResources& res,
                    WorkerOracles& oracles, const fs::path& out_root) {
  ItemOutcome out;
  out.record = {{"id", src.id}, {"status", "ok"}};
  const Document doc = load_document(index, src);
  const fs::path in_image = index.root / doc.image_path;
  const fs::path out_image = out_root / doc.image_path;
  const fs::path out_annotation = out_root / kAnnotationDir / src.annotation.filename();
  const ShiftSpec& s = cfg.shift;

  Document shifted = doc;
  std::optional<Image> new_image;
  switch (s.kind) {
    case ShiftKind::kOriginal:
      copy_into(src.annotation, out_annotation);
      copy_into(in_image, out_image);
      out.document = doc;
      return out;

    case ShiftKind::kTextSwap:
    case ShiftKind::kTextBert: {
      SwapConfig sc{s.mode, s.rate, s.k, cfg.seed};
      TextShiftOutcome t;
      switch (s.mode) {
        case SwapMode::kEmbedding: t = swap_by_embedding(doc, *res.embeddings, sc); break;
        case SwapMode::kHomoglyph: t = swap_homoglyph(doc, *res.homoglyphs, sc); break;
        case SwapMode::kNumber: t = swap_numbers(doc, sc); break;
        case SwapMode::kCharDelete: t = delete_characters(doc, sc); break;
        case SwapMode::kBertAttack: t = bert_attack(doc, oracles.masked_lm(), sc); break;
      }
      out.record["changes"] = text_changes(t);
      if (!t.flagged.empty()) {
        out.record["flags"] = json::array({"selected_words_unchanged"});
        out.record["unchanged_selections"] = t.flagged;
      }
      shifted = std::move(t.document);
      break;
    }

    case ShiftKind::kLayoutMerge: {
      MergeOutcome m = apply_layout_merge(doc, s.merge);
      out.record["groups"] = m.groups;
      out.record["words"] = doc.word_count();
      shifted = std::move(m.document);
      break;
    }

    case ShiftKind::kLayoutMove: {
      std::vector<StrengthScore> strengths;
      if (oracles.has_predictor()) {
        strengths = score_semantic_strength(doc, oracles.predictor(), s.trials,
                                            derive_seed(cfg.seed, src.id + "/strength"));
      } else {
        strengths = heuristic_strength(doc);
      }
      json sj = json::array();
      for (const auto& st : strengths) {
        sj.push_back({{"entity_id", st.entity_id}, {"unchanged", st.unchanged}, {"trials", st.trials}});
      }
      out.record["strengths"] = std::move(sj);
      Rng rng(derive_seed(cfg.seed, src.id + "/move"));
      const Image image = load_image(in_image);
      MoveOutcome m = apply_layout_move(doc, image, strengths, s.strength_threshold, s.count, rng);
      json moves = json::array();
      for (const auto& mv : m.moves) {
        moves.push_back({{"entity_id", mv.entity_id},
                         {"old_box", box_json(mv.old_box)},
                         {"new_box", box_json(mv.new_box)}});
      }
      out.record["moves"] = std::move(moves);
      if (!m.unplaced.empty()) out.record["unplaced"] = m.unplaced;
      if (m.moves.empty() && !m.unplaced.empty()) {
        out.record["status"] = "unshifted";
        out.record["flags"] = json::array({"no_feasible_placement"});
        out.unshifted = true;
      }
      if (!m.moves.empty()) new_image = std::move(m.image);
      shifted = std::move(m.document);
      break;
    }

    case ShiftKind::kImageNatural: {
      const Image image = load_image(in_image);
      std::vector<BoundingBox> boxes;
      for (const auto& e : doc.entities)
        for (const auto& w : e.words) boxes.push_back(w.box);
      const TextMask mask = extract_text_mask(image, boxes, s.mask);
      Rng rng(derive_seed(cfg.seed, src.id + "/natural"));
      const fs::path& pick = res.natural_pool[rng.below(res.natural_pool.size())];
      new_image = replace_background(image, mask, load_image(pick));
      out.record["natural_image"] = pick.filename().string();
      out.record["text_pixels"] = mask.count();
      break;
    }

    case ShiftKind::kImageDistorted: {
      const Image image = load_image(in_image);
      DisplacementField field;
      if (!cfg.resources.fields.empty()) {
        const fs::path fpath = fs::path(cfg.resources.fields) / (src.id + ".dfld");
        field = read_displacement_field(fpath);
        out.record["field"] = fpath.filename().string();
      } else {
        field = synthesize_displacement_field(image.width, image.height, s.amplitude,
                                              s.wavelength, s.perspective,
                                              derive_seed(cfg.seed, src.id + "/field"));
        out.record["field"] = "synthetic";
      }
      std::vector<BoundingBox> boxes;
      for (const auto& e : doc.entities) {
        if (e.words.empty()) boxes.push_back(e.box);
        for (const auto& w : e.words) boxes.push_back(w.box);
      }
      WarpResult w = warp(image, boxes, field);
      json remapped = json::array();
      std::size_t i = 0;
      std::size_t word_index = 0;
      for (auto& e : shifted.entities) {
        if (e.words.empty()) {
          e.box = w.boxes[i++];
          continue;
        }
        for (auto& word : e.words) {
          remapped.push_back({{"word_index", word_index++},
                              {"before", box_json(word.box)},
                              {"after", box_json(w.boxes[i])}});
          word.box = w.boxes[i++];
        }
      }
      refit_entities(shifted);
      out.record["boxes"] = std::move(remapped);
      new_image = std::move(w.image);
      break;
    }
  }

  check_document(shifted);
  write_text_file(out_annotation, serialize_document(shifted));
  if (new_image) {
    fs::create_directories(out_image.parent_path());
    save_image(out_image, *new_image);
  } else {
    copy_into(in_image, out_image);
  }
  out.document = std::move(shifted);
  return out;
}

void prepare_output(const fs::path& input, const fs::path& output, bool force) {
  if (fs::exists(output)) {
    if (fs::exists(input) && fs::equivalent(input, output)) {
      throw ParameterError("output must differ from input");
    }
    if (!fs::is_directory(output)) throw IoError(output.string() + " is not a directory");
    if (!fs::is_empty(output)) {
      if (!force) {
        throw IoError("output directory " + output.string() +
                      " is not empty (use --force to replace a previous run)");
      }
      for (const char* entry : {kAnnotationDir, kImageDir, kClassSidecar, kQaSidecar, kManifestFile}) {
        fs::remove_all(output / entry);
      }
      if (!fs::is_empty(output)) {
        throw IoError("output directory " + output.string() + " holds files this toolkit did not write");
      }
    }
  }
  fs::create_directories(output / kAnnotationDir);
  fs::create_directories(output / kImageDir);
}

json recorded_config(const PipelineConfig& cfg) {
  json j = config_to_json(cfg);
  // Neither affects the produced bytes.
  j.erase("output");
  j.erase("workers");
  return j;
}

}  // namespace

ShiftRunResult run_shift(const PipelineConfig& cfg, const RunOptions& options) {
  check_config_paths(cfg);
  if (cfg.output.empty()) throw ParameterError("output path is not set");
  const fs::path input(cfg.input);
  const fs::path output(cfg.output);
  const DatasetIndex index = index_dataset(input, cfg.task);
  const std::string input_digest = directory_digest(input);
  const SharedResources resources = load_resources(cfg);
  prepare_output(input, output, options.force);

  spdlog::info("shift {}: {} documents from {} with {} worker(s)", shift_kind_name(cfg.shift.kind),
               index.items.size(), input.string(), cfg.workers);

  std::vector<ItemOutcome> outcomes(index.items.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    WorkerOracles oracles(cfg, options.oracles);
    for (std::size_t i = next++; i < index.items.size(); i = next++) {
      const auto& src = index.items[i];
      try {
        outcomes[i] = process(cfg, index, src, resources, oracles, output);
        spdlog::debug("{}: ok", src.id);
      } catch (const std::exception& e) {
        spdlog::error("{}: {}", src.id, e.what());
        outcomes[i].failed = true;
        outcomes[i].record = {{"id", src.id},
                              {"status", "failed"},
                              {"flags", json::array({"failed"})},
                              {"error", e.what()}};
      }
    }
  };
  const int n_threads = std::max(1, std::min<int>(cfg.workers, static_cast<int>(index.items.size())));
  {
    std::vector<std::jthread> pool;
    for (int t = 1; t < n_threads; ++t) pool.emplace_back(work);
    work();
  }

  ShiftRunResult result;
  result.documents = index.items.size();
  std::vector<Document> written;
  json items = json::array();
  for (auto& o : outcomes) {
    if (o.failed) ++result.failed;
    if (o.unshifted) ++result.unshifted;
    if (o.document) written.push_back(std::move(*o.document));
    items.push_back(std::move(o.record));
  }

  if (cfg.task != Task::kIe) {
    const char* sidecar = cfg.task == Task::kClassification ? kClassSidecar : kQaSidecar;
    if (result.failed == 0) {
      copy_into(input / sidecar, output / sidecar);
    } else {
      write_text_file(output / sidecar, cfg.task == Task::kClassification
                                            ? format_class_sidecar(written)
                                            : format_qa_sidecar(written));
    }
  }

  const std::string output_digest = directory_digest(output, {kManifestFile});
  result.manifest = {
      {"toolkit", "docshift"},
      {"toolkit_version", kToolkitVersion},
      {"task", std::string(task_name(cfg.task))},
      {"master_seed", cfg.seed},
      {"shift", {{"kind", std::string(shift_kind_name(cfg.shift.kind))},
                 {"parameters", shift_parameters(cfg)}}},
      {"config", recorded_config(cfg)},
      {"input_digest", input_digest},
      {"output_digest", output_digest},
      {"summary", {{"documents", result.documents},
                   {"failed", result.failed},
                   {"unshifted", result.unshifted}}},
      {"items", std::move(items)},
  };
  write_text_file(output / kManifestFile, result.manifest.dump(2) + "\n");
  spdlog::info("wrote {} ({} failed, {} unshifted), digest {}", output.string(), result.failed,
               result.unshifted, output_digest);
  return result;
}

ReplayResult replay(const fs::path& manifest_path, const fs::path& output,
                    const std::optional<std::string>& input, int workers,
                    const RunOptions& options) {
  json manifest;
  try {
    manifest = json::parse(read_text_file(manifest_path));
  } catch (const json::parse_error& e) {
    throw ParseError(manifest_path.string(), std::string("invalid manifest JSON: ") + e.what());
  }
  if (!manifest.contains("config") || !manifest.contains("output_digest") ||
      !manifest.contains("input_digest")) {
    throw ParseError(manifest_path.string(), "manifest lacks config or digests");
  }
  json cj = manifest["config"];
  if (input) cj["input"] = *input;
  cj["output"] = output.string();
  cj["workers"] = workers;
  const PipelineConfig cfg = config_from_json(cj);

  ReplayResult r;
  r.expected_output_digest = manifest["output_digest"].get<std::string>();
  r.input_matches = directory_digest(cfg.input) == manifest["input_digest"].get<std::string>();
  if (!r.input_matches) {
    spdlog::warn("input digest differs from the manifest; replay cannot match");
  }
  run_shift(cfg, options);
  r.actual_output_digest = directory_digest(output, {kManifestFile});
  r.output_matches = r.actual_output_digest == r.expected_output_digest;
  return r;
}

ValidationReport validate_dataset(const fs::path& root, Task task) {
  if (!fs::exists(root)) throw IoError("dataset path " + root.string() + " does not exist");
  ValidationReport report;
  DatasetIndex index;
  try {
    index = index_dataset(root, task);
  } catch (const IoError&) {
    throw;
  } catch (const Error& e) {
    report.violations.push_back({task == Task::kClassification ? kClassSidecar : kQaSidecar, e.what()});
    return report;
  }
  report.documents = index.items.size();
  std::set<std::string> images;
  for (const auto& src : index.items) {
    const std::string file = (fs::path(kAnnotationDir) / src.annotation.filename()).generic_string();
    if (src.image.empty()) {
      report.violations.push_back({file, "no matching image in " + std::string(kImageDir) + "/"});
      continue;
    }
    images.insert(src.image);
    try {
      load_document(index, src);
    } catch (const Error& e) {
      report.violations.push_back({file, e.what()});
    }
  }
  for (const auto& [image, _] : index.classes) {
    if (!images.count(image)) {
      report.violations.push_back({kClassSidecar, "entry for unknown image " + image});
    }
  }
  for (const auto& [image, _] : index.questions) {
    if (!images.count(image)) {
      report.violations.push_back({kQaSidecar, "entry for unknown image " + image});
    }
  }
  return report;
}

ScoreReport score_files(const fs::path& gold, const fs::path& predictions, Task task, double tau) {
  const std::vector<Document> docs = load_dataset(gold, task);
  const PredictionSet preds = parse_predictions(read_text_file(predictions), task);
  const auto problems = validate_predictions(docs, preds, task);
  if (!problems.empty()) {
    std::string msg = std::to_string(problems.size()) + " alignment problem(s):";
    for (const auto& p : problems) msg += "\n  " + p;
    throw AlignmentError(msg);
  }
  return score(docs, preds, task, tau);
}

std::string render_report(const ScoreReport& r, Task task) {
  std::string out;
  auto row = [&](const std::string& name, double v) {
    out += fmt::format("  {:<24} {:>7.2f}\n", name, 100.0 * v);
  };
  out += fmt::format("task: {}\n", task_name(task));
  switch (task) {
    case Task::kIe:
      row("precision", r.precision.value_or(0.0));
      row("recall", r.recall.value_or(0.0));
      row("F1", r.f1.value_or(0.0));
      for (const auto& [label, err] : r.per_label_error) row(label + " error", err);
      out += fmt::format("  {:<24} {:>7}\n", "gold entities", r.gold_count);
      out += fmt::format("  {:<24} {:>7}\n", "predicted entities", r.predicted_count);
      out += fmt::format("  {:<24} {:>7}\n", "matched", r.matched_count);
      break;
    case Task::kClassification:
      row("accuracy", r.accuracy.value_or(0.0));
      break;
    case Task::kVqa:
      row("ANLS", r.anls.value_or(0.0));
      break;
  }
  return out;
}

json report_json(const ScoreReport& r, Task task, double tau) {
  json j = {{"task", std::string(task_name(task))}};
  if (r.precision) j["precision"] = *r.precision;
  if (r.recall) j["recall"] = *r.recall;
  if (r.f1) j["f1"] = *r.f1;
  if (r.accuracy) j["accuracy"] = *r.accuracy;
  if (r.anls) {
    j["anls"] = *r.anls;
    j["tau"] = tau;
  }
  if (task == Task::kIe) {
    j["per_label_error"] = r.per_label_error;
    j["gold_entities"] = r.gold_count;
    j["predicted_entities"] = r.predicted_count;
    j["matched_entities"] = r.matched_count;
  }
  return j;
}

json stats_json(const DatasetStats& s) {
  return {{"documents", s.documents}, {"entities", s.entities}, {"words", s.words}, {"labels", s.labels}};
}

}  // namespace docshift
