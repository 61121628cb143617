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

#ifndef DOCSHIFT_DOCUMENT_HPP_
#define DOCSHIFT_DOCUMENT_HPP_

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "docshift/box.hpp"

namespace docshift {

enum class Label { kHeader, kQuestion, kAnswer, kOther };

std::string_view label_name(Label label);
// Case-insensitive. Returns nullopt for anything outside the label set.
std::optional<Label> parse_label(std::string_view name);

enum class Task { kIe, kClassification, kVqa };

std::string_view task_name(Task task);
Task parse_task(std::string_view name);

// Which out-of-distribution variant a dataset item belongs to.
enum class ShiftKind {
  kOriginal,
  kImageNatural,
  kImageDistorted,
  kTextBert,
  kTextSwap,
  kLayoutMerge,
  kLayoutMove,
};

std::string_view shift_kind_name(ShiftKind kind);
ShiftKind parse_shift_kind(std::string_view name);

struct Word {
  std::string text;
  BoundingBox box;

  friend bool operator==(const Word&, const Word&) = default;
};

struct Entity {
  int id = 0;
  std::vector<Word> words;
  BoundingBox box;
  std::optional<Label> label;
  std::vector<std::pair<int, int>> links;
  // Entity-level text as annotated. Serialization regenerates it from the
  // words when there are any.
  std::string text;

  friend bool operator==(const Entity&, const Entity&) = default;
};

constexpr int kNumDocumentClasses = 16;

struct QaPair {
  std::string question;
  std::vector<std::string> answers;

  friend bool operator==(const QaPair&, const QaPair&) = default;
};

struct IePayload {
  friend bool operator==(const IePayload&, const IePayload&) = default;
};
struct ClassificationPayload {
  int label = 0;
  friend bool operator==(const ClassificationPayload&,
                         const ClassificationPayload&) = default;
};
struct VqaPayload {
  std::vector<QaPair> questions;
  friend bool operator==(const VqaPayload&, const VqaPayload&) = default;
};

using TaskPayload = std::variant<IePayload, ClassificationPayload, VqaPayload>;

struct Document {
  std::string id;
  // Path of the page image relative to the dataset root.
  std::string image_path;
  int width = 0;
  int height = 0;
  std::vector<Entity> entities;
  TaskPayload payload;

  std::size_t word_count() const;

  friend bool operator==(const Document&, const Document&) = default;
};

// Position of a word in reading order: entities in order, then their words.
struct WordRef {
  std::size_t entity = 0;
  std::size_t word = 0;
};
std::vector<WordRef> word_refs(const Document& doc);

// Checks every Document invariant. Throws ValidationError naming the
// first violation.
void check_document(const Document& doc);

// Joins the entity's word texts with single spaces.
std::string joined_text(const Entity& entity);

struct DatasetStats {
  std::size_t documents = 0;
  std::size_t entities = 0;
  std::size_t words = 0;
  std::map<std::string, std::size_t> labels;

  friend bool operator==(const DatasetStats&, const DatasetStats&) = default;
};

DatasetStats dataset_stats(const std::vector<Document>& docs);

}  // namespace docshift

#endif  // DOCSHIFT_DOCUMENT_HPP_
