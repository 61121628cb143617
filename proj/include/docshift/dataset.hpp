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

#ifndef DOCSHIFT_DATASET_HPP_
#define DOCSHIFT_DATASET_HPP_

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "docshift/document.hpp"

namespace docshift {

// On-disk layout shared by every task:
//
//   <root>/annotations/<id>.json   FUNSD-style words, boxes, labels
//   <root>/images/<id>.<ext>       page image
//   <root>/labels.txt              classification: "<image path> <class>"
//   <root>/qa.jsonl                vqa: {"image", "question", "answers"}
//
// Image paths in sidecars are relative to the root.
inline constexpr const char* kAnnotationDir = "annotations";
inline constexpr const char* kImageDir = "images";
inline constexpr const char* kClassSidecar = "labels.txt";
inline constexpr const char* kQaSidecar = "qa.jsonl";

struct DocumentSource {
  std::string id;
  std::filesystem::path annotation;  // absolute
  std::string image;                 // relative to root; empty if missing
};

struct DatasetIndex {
  std::filesystem::path root;
  Task task = Task::kIe;
  std::vector<DocumentSource> items;  // sorted by id
  std::map<std::string, int> classes;
  std::map<std::string, std::vector<QaPair>> questions;
};

// Lists annotation files and reads the task sidecar. Throws IoError when the
// layout is missing and ParseError for a malformed sidecar line.
DatasetIndex index_dataset(const std::filesystem::path& root, Task task);

// Parses one annotation, reading page dimensions from its image and
// attaching the sidecar payload.
Document load_document(const DatasetIndex& index, const DocumentSource& source);

std::vector<Document> load_dataset(const std::filesystem::path& root, Task task);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);
void parse_class_sidecar(const std::string& text, std::map<std::string, int>& out);
std::string format_class_sidecar(const std::vector<Document>& docs);
void parse_qa_sidecar(const std::string& text,
                      std::map<std::string, std::vector<QaPair>>& out);
std::string format_qa_sidecar(const std::vector<Document>& docs);

}  // namespace docshift

#endif  // DOCSHIFT_DATASET_HPP_
