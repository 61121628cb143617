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

#include "docshift/document.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "docshift/errors.hpp"

namespace docshift {

std::string_view label_name(Label label) {
  switch (label) {
    case Label::kHeader: return "header";
    case Label::kQuestion: return "question";
    case Label::kAnswer: return "answer";
    case Label::kOther: return "other";
  }
  return "other";
}

std::optional<Label> parse_label(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (lower == "header") return Label::kHeader;
  if (lower == "question") return Label::kQuestion;
  if (lower == "answer") return Label::kAnswer;
  if (lower == "other") return Label::kOther;
  return std::nullopt;
}

std::string_view task_name(Task task) {
  switch (task) {
    case Task::kIe: return "ie";
    case Task::kClassification: return "classification";
    case Task::kVqa: return "vqa";
  }
  return "ie";
}

Task parse_task(std::string_view name) {
  if (name == "ie") return Task::kIe;
  if (name == "classification") return Task::kClassification;
  if (name == "vqa") return Task::kVqa;
  throw ParameterError("unknown task '" + std::string(name) +
                       "' (expected ie, classification or vqa)");
}

std::string_view shift_kind_name(ShiftKind kind) {
  switch (kind) {
    case ShiftKind::kOriginal: return "original";
    case ShiftKind::kImageNatural: return "image_natural";
    case ShiftKind::kImageDistorted: return "image_distorted";
    case ShiftKind::kTextBert: return "text_bert";
    case ShiftKind::kTextSwap: return "text_swap";
    case ShiftKind::kLayoutMerge: return "layout_merge";
    case ShiftKind::kLayoutMove: return "layout_move";
  }
  return "original";
}

ShiftKind parse_shift_kind(std::string_view name) {
  for (auto kind : {ShiftKind::kOriginal, ShiftKind::kImageNatural, ShiftKind::kImageDistorted,
                    ShiftKind::kTextBert, ShiftKind::kTextSwap, ShiftKind::kLayoutMerge,
                    ShiftKind::kLayoutMove}) {
    if (shift_kind_name(kind) == name) return kind;
  }
  throw ParameterError("unknown shift kind '" + std::string(name) + "'");
}

std::size_t Document::word_count() const {
  std::size_t n = 0;
  for (const auto& e : entities) n += e.words.size();
  return n;
}

std::vector<WordRef> word_refs(const Document& doc) {
  std::vector<WordRef> refs;
  refs.reserve(doc.word_count());
  for (std::size_t e = 0; e < doc.entities.size(); ++e) {
    for (std::size_t w = 0; w < doc.entities[e].words.size(); ++w) {
      refs.push_back({e, w});
    }
  }
  return refs;
}

std::string joined_text(const Entity& entity) {
  std::string out;
  for (const auto& w : entity.words) {
    if (!out.empty()) out += ' ';
    out += w.text;
  }
  return out;
}

void check_document(const Document& doc) {
  const std::string where = "document '" + doc.id + "'";
  if (doc.width <= 0 || doc.height <= 0) {
    throw ValidationError(where + ": page dimensions must be positive");
  }
  const BoundingBox page{0, 0, doc.width, doc.height};
  std::set<int> ids;
  for (const auto& e : doc.entities) {
    const std::string ent = where + " entity " + std::to_string(e.id);
    if (!ids.insert(e.id).second) {
      throw ValidationError(ent + ": duplicate entity id");
    }
    if (!e.box.valid()) throw ValidationError(ent + ": invalid box");
    for (const auto& w : e.words) {
      if (w.text.empty()) throw ValidationError(ent + ": empty word text");
      if (!w.box.valid()) throw ValidationError(ent + ": invalid word box");
      if (!page.contains(w.box)) {
        throw ValidationError(ent + ": word box outside page");
      }
      if (!e.box.contains(w.box)) {
        throw ValidationError(ent + ": entity box does not enclose its words");
      }
    }
  }
}

DatasetStats dataset_stats(const std::vector<Document>& docs) {
  DatasetStats stats;
  stats.documents = docs.size();
  for (const auto& doc : docs) {
    stats.entities += doc.entities.size();
    for (const auto& e : doc.entities) {
      stats.words += e.words.size();
      if (e.label) ++stats.labels[std::string(label_name(*e.label))];
    }
  }
  return stats;
}

}  // namespace docshift
