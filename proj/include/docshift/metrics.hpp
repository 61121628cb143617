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

#ifndef DOCSHIFT_METRICS_HPP_
#define DOCSHIFT_METRICS_HPP_

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "docshift/document.hpp"

namespace docshift {

// Half-open word range [begin, end) carrying one label.
struct LabeledSpan {
  std::size_t begin = 0;
  std::size_t end = 0;
  Label label = Label::kOther;

  friend bool operator==(const LabeledSpan&, const LabeledSpan&) = default;
  friend auto operator<=>(const LabeledSpan&, const LabeledSpan&) = default;
};

// Decodes B-/I-/O tags (label part case-insensitive). An I- tag that does
// not continue an entity of the same label opens a new one. Throws
// ValidationError for tags outside the scheme.
std::vector<LabeledSpan> decode_bio(std::span<const std::string> tags);

// Gold spans straight from entity boundaries; entities without words or
// labels are skipped.
std::vector<LabeledSpan> gold_spans(const Document& doc);
// BIO encoding of the gold entities, one tag per word.
std::vector<std::string> gold_tags(const Document& doc);

struct DocumentPrediction {
  std::optional<std::vector<std::string>> tags;
  std::optional<int> label;
  std::optional<std::vector<std::string>> answers;
};

// Keyed by document id.
using PredictionSet = std::map<std::string, DocumentPrediction>;

// JSON Lines, one object per document:
//   ie:             {"id": "...", "tags": ["B-QUESTION", "I-QUESTION", "O"]}
//   classification: {"id": "...", "class": 3}
//   vqa:            {"id": "...", "answers": ["answer to q0", "answer to q1"]}
PredictionSet parse_predictions(std::string_view jsonl, Task task);
std::string serialize_predictions(const PredictionSet& preds, Task task);

// Lists every schema or alignment problem of `preds` against `gold`.
std::vector<std::string> validate_predictions(const std::vector<Document>& gold,
                                              const PredictionSet& preds, Task task);

struct ScoreReport {
  std::optional<double> precision;
  std::optional<double> recall;
  std::optional<double> f1;
  std::optional<double> accuracy;
  std::optional<double> anls;
  // Keys: "other", "question_or_answer", "header". Groups absent from the
  // gold data are omitted.
  std::map<std::string, double> per_label_error;
  std::size_t gold_count = 0;
  std::size_t predicted_count = 0;
  std::size_t matched_count = 0;
};

ScoreReport entity_f1(const std::vector<Document>& gold, const PredictionSet& preds);
std::map<std::string, double> label_error_rates(const std::vector<Document>& gold,
                                                const PredictionSet& preds);
double accuracy(const std::vector<Document>& gold, const PredictionSet& preds);

constexpr double kDefaultAnlsThreshold = 0.5;

std::size_t levenshtein(std::u32string_view a, std::u32string_view b);
// 1 - edit distance / max length after lowercasing and trimming; 1 for two
// empty strings.
double normalized_similarity(std::string_view gold, std::string_view prediction);
// Best thresholded similarity against any gold answer.
double anls(std::span<const std::string> gold_answers, std::string_view prediction,
            double tau = kDefaultAnlsThreshold);
// Mean anls over every question of every document.
double dataset_anls(const std::vector<Document>& gold, const PredictionSet& preds,
                    double tau = kDefaultAnlsThreshold);

// Dispatches on the task and fills the matching report fields.
ScoreReport score(const std::vector<Document>& gold, const PredictionSet& preds, Task task,
                  double tau = kDefaultAnlsThreshold);

}  // namespace docshift

#endif  // DOCSHIFT_METRICS_HPP_
