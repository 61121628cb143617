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

#include "docshift/metrics.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "json.hpp"

#include "docshift/errors.hpp"
#include "docshift/utf8.hpp"

namespace docshift {
namespace {

using nlohmann::json;

std::string upper(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

const DocumentPrediction& find_prediction(const PredictionSet& preds, const Document& doc) {
  auto it = preds.find(doc.id);
  if (it == preds.end()) throw AlignmentError("no prediction for document '" + doc.id + "'");
  return it->second;
}

void reject_unknown_ids(const std::vector<Document>& gold, const PredictionSet& preds) {
  std::set<std::string> ids;
  for (const auto& d : gold) ids.insert(d.id);
  for (const auto& [id, _] : preds) {
    if (!ids.count(id)) throw AlignmentError("prediction for unknown document '" + id + "'");
  }
}

const std::vector<std::string>& aligned_tags(const PredictionSet& preds, const Document& doc) {
  const auto& p = find_prediction(preds, doc);
  if (!p.tags) throw AlignmentError("prediction for document '" + doc.id + "' has no tags");
  if (p.tags->size() != doc.word_count()) {
    throw AlignmentError("document '" + doc.id + "': " + std::to_string(p.tags->size()) +
                         " predicted tags for " + std::to_string(doc.word_count()) + " words");
  }
  return *p.tags;
}

std::string group_of(Label label) {
  switch (label) {
    case Label::kHeader: return "header";
    case Label::kQuestion:
    case Label::kAnswer: return "question_or_answer";
    case Label::kOther: return "other";
  }
  return "other";
}

}  // namespace

std::vector<LabeledSpan> decode_bio(std::span<const std::string> tags) {
  std::vector<LabeledSpan> spans;
  std::optional<LabeledSpan> open;
  auto close = [&] {
    if (open) spans.push_back(*open);
    open.reset();
  };
  for (std::size_t i = 0; i < tags.size(); ++i) {
    const std::string& tag = tags[i];
    if (tag == "O" || tag == "o") {
      close();
      continue;
    }
    if (tag.size() < 3 || tag[1] != '-' ||
        (tag[0] != 'B' && tag[0] != 'I' && tag[0] != 'b' && tag[0] != 'i')) {
      throw ValidationError("tag " + std::to_string(i) + " '" + tag + "' is not in BIO form");
    }
    const auto label = parse_label(std::string_view(tag).substr(2));
    if (!label) throw ValidationError("tag " + std::to_string(i) + " '" + tag + "' has unknown label");
    const bool inside = tag[0] == 'I' || tag[0] == 'i';
    if (inside && open && open->label == *label) {
      open->end = i + 1;
      continue;
    }
    close();
    open = LabeledSpan{i, i + 1, *label};
  }
  close();
  return spans;
}

std::vector<LabeledSpan> gold_spans(const Document& doc) {
  std::vector<LabeledSpan> spans;
  std::size_t pos = 0;
  for (const auto& e : doc.entities) {
    if (!e.words.empty() && e.label) spans.push_back({pos, pos + e.words.size(), *e.label});
    pos += e.words.size();
  }
  return spans;
}

std::vector<std::string> gold_tags(const Document& doc) {
  std::vector<std::string> tags;
  tags.reserve(doc.word_count());
  for (const auto& e : doc.entities) {
    for (std::size_t w = 0; w < e.words.size(); ++w) {
      if (!e.label) {
        tags.emplace_back("O");
      } else {
        tags.push_back((w == 0 ? "B-" : "I-") + upper(label_name(*e.label)));
      }
    }
  }
  return tags;
}

PredictionSet parse_predictions(std::string_view jsonl, Task task) {
  PredictionSet preds;
  std::istringstream in{std::string(jsonl)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (utf8::trim(line).empty()) continue;
    const std::string where = "line " + std::to_string(lineno);
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(where, std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ParseError(where, "record must be an object");
    if (!j.contains("id") || !j["id"].is_string()) throw ParseError(where + ".id", "missing string id");
    const auto id = j["id"].get<std::string>();
    DocumentPrediction p;
    switch (task) {
      case Task::kIe: {
        if (!j.contains("tags") || !j["tags"].is_array()) throw ParseError(where + ".tags", "missing tags array");
        std::vector<std::string> tags;
        for (const auto& t : j["tags"]) {
          if (!t.is_string()) throw ParseError(where + ".tags", "tags must be strings");
          tags.push_back(t.get<std::string>());
        }
        p.tags = std::move(tags);
        break;
      }
      case Task::kClassification:
        if (!j.contains("class") || !j["class"].is_number_integer()) {
          throw ParseError(where + ".class", "missing integer class");
        }
        p.label = j["class"].get<int>();
        break;
      case Task::kVqa: {
        if (!j.contains("answers") || !j["answers"].is_array()) {
          throw ParseError(where + ".answers", "missing answers array");
        }
        std::vector<std::string> answers;
        for (const auto& a : j["answers"]) {
          if (!a.is_string()) throw ParseError(where + ".answers", "answers must be strings");
          answers.push_back(a.get<std::string>());
        }
        p.answers = std::move(answers);
        break;
      }
    }
    if (!preds.emplace(id, std::move(p)).second) {
      throw ParseError(where + ".id", "duplicate prediction for '" + id + "'");
    }
  }
  return preds;
}

std::string serialize_predictions(const PredictionSet& preds, Task task) {
  std::string out;
  for (const auto& [id, p] : preds) {
    json j = {{"id", id}};
    if (task == Task::kIe && p.tags) j["tags"] = *p.tags;
    if (task == Task::kClassification && p.label) j["class"] = *p.label;
    if (task == Task::kVqa && p.answers) j["answers"] = *p.answers;
    out += j.dump() + "\n";
  }
  return out;
}

std::vector<std::string> validate_predictions(const std::vector<Document>& gold,
                                              const PredictionSet& preds, Task task) {
  std::vector<std::string> problems;
  std::set<std::string> ids;
  for (const auto& doc : gold) {
    ids.insert(doc.id);
    auto it = preds.find(doc.id);
    if (it == preds.end()) {
      problems.push_back("missing prediction for document '" + doc.id + "'");
      continue;
    }
    const auto& p = it->second;
    switch (task) {
      case Task::kIe:
        if (!p.tags) {
          problems.push_back("document '" + doc.id + "': no tags");
        } else if (p.tags->size() != doc.word_count()) {
          problems.push_back("document '" + doc.id + "': " + std::to_string(p.tags->size()) +
                             " tags for " + std::to_string(doc.word_count()) + " words");
        } else {
          try {
            decode_bio(*p.tags);
          } catch (const ValidationError& e) {
            problems.push_back("document '" + doc.id + "': " + e.what());
          }
        }
        break;
      case Task::kClassification:
        if (!p.label || *p.label < 0 || *p.label >= kNumDocumentClasses) {
          problems.push_back("document '" + doc.id + "': class must be in 0..15");
        }
        break;
      case Task::kVqa: {
        const auto* qa = std::get_if<VqaPayload>(&doc.payload);
        const std::size_t n = qa ? qa->questions.size() : 0;
        if (!p.answers || p.answers->size() != n) {
          problems.push_back("document '" + doc.id + "': expected " + std::to_string(n) +
                             " answers");
        }
        break;
      }
    }
  }
  for (const auto& [id, _] : preds) {
    if (!ids.count(id)) problems.push_back("prediction for unknown document '" + id + "'");
  }
  return problems;
}

ScoreReport entity_f1(const std::vector<Document>& gold, const PredictionSet& preds) {
  reject_unknown_ids(gold, preds);
  ScoreReport report;
  for (const auto& doc : gold) {
    const auto predicted = decode_bio(aligned_tags(preds, doc));
    const auto expected = gold_spans(doc);
    const std::set<LabeledSpan> truth(expected.begin(), expected.end());
    report.gold_count += expected.size();
    report.predicted_count += predicted.size();
    for (const auto& s : predicted) report.matched_count += truth.count(s);
  }
  const double tp = static_cast<double>(report.matched_count);
  const double p = report.predicted_count ? tp / report.predicted_count : 0.0;
  const double r = report.gold_count ? tp / report.gold_count : 0.0;
  report.precision = p;
  report.recall = r;
  report.f1 = (p + r) > 0.0 ? 2.0 * p * r / (p + r) : 0.0;
  report.per_label_error = label_error_rates(gold, preds);
  return report;
}

std::map<std::string, double> label_error_rates(const std::vector<Document>& gold,
                                                const PredictionSet& preds) {
  reject_unknown_ids(gold, preds);
  std::map<std::string, std::pair<std::size_t, std::size_t>> counts;  // recovered, total
  for (const auto& doc : gold) {
    const auto predicted = decode_bio(aligned_tags(preds, doc));
    const std::set<LabeledSpan> found(predicted.begin(), predicted.end());
    for (const auto& s : gold_spans(doc)) {
      auto& [recovered, total] = counts[group_of(s.label)];
      ++total;
      recovered += found.count(s);
    }
  }
  std::map<std::string, double> rates;
  for (const auto& [group, c] : counts) {
    rates[group] = 1.0 - static_cast<double>(c.first) / static_cast<double>(c.second);
  }
  return rates;
}

double accuracy(const std::vector<Document>& gold, const PredictionSet& preds) {
  reject_unknown_ids(gold, preds);
  if (gold.empty()) return 0.0;
  std::size_t correct = 0;
  for (const auto& doc : gold) {
    const auto* truth = std::get_if<ClassificationPayload>(&doc.payload);
    if (!truth) throw ValidationError("document '" + doc.id + "' has no class label");
    const auto& p = find_prediction(preds, doc);
    if (!p.label) throw AlignmentError("prediction for document '" + doc.id + "' has no class");
    if (*p.label == truth->label) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(gold.size());
}

std::size_t levenshtein(std::u32string_view a, std::u32string_view b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1)});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

double normalized_similarity(std::string_view gold, std::string_view prediction) {
  const auto a = utf8::decode(utf8::to_lower_ascii(utf8::trim(gold)));
  const auto b = utf8::decode(utf8::to_lower_ascii(utf8::trim(prediction)));
  const std::size_t longest = std::max(a.size(), b.size());
  if (longest == 0) return 1.0;
  return 1.0 - static_cast<double>(levenshtein(a, b)) / static_cast<double>(longest);
}

double anls(std::span<const std::string> gold_answers, std::string_view prediction, double tau) {
  if (gold_answers.empty()) throw ParameterError("anls needs at least one gold answer");
  double best = 0.0;
  for (const auto& a : gold_answers) {
    const double s = normalized_similarity(a, prediction);
    if (s >= tau) best = std::max(best, s);
  }
  return best;
}

double dataset_anls(const std::vector<Document>& gold, const PredictionSet& preds, double tau) {
  reject_unknown_ids(gold, preds);
  double sum = 0.0;
  std::size_t questions = 0;
  for (const auto& doc : gold) {
    const auto* qa = std::get_if<VqaPayload>(&doc.payload);
    if (!qa) throw ValidationError("document '" + doc.id + "' has no questions");
    const auto& p = find_prediction(preds, doc);
    if (!p.answers || p.answers->size() != qa->questions.size()) {
      throw AlignmentError("document '" + doc.id + "': expected " +
                           std::to_string(qa->questions.size()) + " answers");
    }
    for (std::size_t q = 0; q < qa->questions.size(); ++q) {
      sum += anls(qa->questions[q].answers, (*p.answers)[q], tau);
      ++questions;
    }
  }
  return questions ? sum / static_cast<double>(questions) : 0.0;
}

ScoreReport score(const std::vector<Document>& gold, const PredictionSet& preds, Task task,
                  double tau) {
  switch (task) {
    case Task::kIe: return entity_f1(gold, preds);
    case Task::kClassification: {
      ScoreReport r;
      r.accuracy = accuracy(gold, preds);
      r.gold_count = gold.size();
      return r;
    }
    case Task::kVqa: {
      ScoreReport r;
      r.anls = dataset_anls(gold, preds, tau);
      r.gold_count = gold.size();
      return r;
    }
  }
  return {};
}

}  // namespace docshift
