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

#include "docshift/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "docshift/annotation.hpp"
#include "docshift/errors.hpp"
#include "docshift/image.hpp"
#include "docshift/utf8.hpp"

namespace docshift {
namespace fs = std::filesystem;
namespace {

bool is_image_file(const fs::path& p) {
  std::string ext = utf8::to_lower_ascii(p.extension().string());
  return ext == ".png" || ext == ".jpg" || ext == ".jpeg" || ext == ".tif" || ext == ".tiff" ||
         ext == ".bmp";
}

}  // namespace

std::string read_text_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("cannot write " + path.string());
}

void parse_class_sidecar(const std::string& text, std::map<std::string, int>& out) {
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string where = std::string(kClassSidecar) + ":" + std::to_string(lineno);
    if (utf8::trim(line).empty()) continue;
    std::istringstream fields(line);
    std::string image;
    long label = -1;
    std::string rest;
    if (!(fields >> image >> label) || (fields >> rest)) {
      throw ParseError(where, "expected '<image path> <class id>'");
    }
    if (label < 0 || label >= kNumDocumentClasses) {
      throw ValidationError(where + ": class id " + std::to_string(label) + " outside 0..15");
    }
    out[image] = static_cast<int>(label);
  }
}

std::string format_class_sidecar(const std::vector<Document>& docs) {
  std::string out;
  for (const auto& d : docs) {
    if (const auto* c = std::get_if<ClassificationPayload>(&d.payload)) {
      out += d.image_path + " " + std::to_string(c->label) + "\n";
    }
  }
  return out;
}

void parse_qa_sidecar(const std::string& text, std::map<std::string, std::vector<QaPair>>& out) {
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string where = std::string(kQaSidecar) + ":" + std::to_string(lineno);
    if (utf8::trim(line).empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(where, std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object() || !j.contains("image") || !j["image"].is_string() ||
        !j.contains("question") || !j["question"].is_string() || !j.contains("answers") ||
        !j["answers"].is_array()) {
      throw ParseError(where, "expected {image: string, question: string, answers: [string]}");
    }
    QaPair qa{j["question"].get<std::string>(), {}};
    for (const auto& a : j["answers"]) {
      if (!a.is_string()) throw ParseError(where + ".answers", "answers must be strings");
      qa.answers.push_back(a.get<std::string>());
    }
    if (qa.answers.empty()) throw ValidationError(where + ": empty answer list");
    out[j["image"].get<std::string>()].push_back(std::move(qa));
  }
}

std::string format_qa_sidecar(const std::vector<Document>& docs) {
  std::string out;
  for (const auto& d : docs) {
    const auto* v = std::get_if<VqaPayload>(&d.payload);
    if (!v) continue;
    for (const auto& qa : v->questions) {
      nlohmann::ordered_json j;
      j["image"] = d.image_path;
      j["question"] = qa.question;
      j["answers"] = qa.answers;
      out += j.dump() + "\n";
    }
  }
  return out;
}

DatasetIndex index_dataset(const fs::path& root, Task task) {
  const fs::path ann_dir = root / kAnnotationDir;
  if (!fs::is_directory(ann_dir)) {
    throw IoError("dataset " + root.string() + " has no " + kAnnotationDir + "/ directory");
  }
  DatasetIndex index;
  index.root = root;
  index.task = task;

  std::map<std::string, std::string> images;  // stem -> relative path
  if (fs::is_directory(root / kImageDir)) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(root / kImageDir)) {
      if (entry.is_regular_file() && is_image_file(entry.path())) files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
      images.emplace(f.stem().string(),
                     (fs::path(kImageDir) / f.filename()).generic_string());
    }
  }

  std::vector<fs::path> annotations;
  for (const auto& entry : fs::directory_iterator(ann_dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") {
      annotations.push_back(entry.path());
    }
  }
  std::sort(annotations.begin(), annotations.end());
  for (const auto& a : annotations) {
    DocumentSource src{a.stem().string(), a, {}};
    if (auto it = images.find(src.id); it != images.end()) src.image = it->second;
    index.items.push_back(std::move(src));
  }

  if (task == Task::kClassification) {
    const fs::path sidecar = root / kClassSidecar;
    if (!fs::exists(sidecar)) throw IoError("classification dataset lacks " + sidecar.string());
    parse_class_sidecar(read_text_file(sidecar), index.classes);
  } else if (task == Task::kVqa) {
    const fs::path sidecar = root / kQaSidecar;
    if (!fs::exists(sidecar)) throw IoError("vqa dataset lacks " + sidecar.string());
    parse_qa_sidecar(read_text_file(sidecar), index.questions);
  }
  return index;
}

Document load_document(const DatasetIndex& index, const DocumentSource& source) {
  if (source.image.empty()) {
    throw IoError("no image found for annotation " + source.annotation.string());
  }
  const Image image = load_image(index.root / source.image);
  const ImageRef ref{source.id, source.image, image.width, image.height};
  Document doc;
  try {
    doc = parse_ie_document(read_text_file(source.annotation), ref,
                            index.task == Task::kIe);
  } catch (const ParseError& e) {
    throw ParseError(source.annotation.filename().string() + ":" + e.path(), e.detail());
  } catch (const ValidationError& e) {
    throw ValidationError(source.annotation.filename().string() + ": " + e.what());
  }
  switch (index.task) {
    case Task::kIe:
      doc.payload = IePayload{};
      break;
    case Task::kClassification: {
      auto it = index.classes.find(source.image);
      if (it == index.classes.end()) {
        throw ValidationError("no class label for " + source.image);
      }
      doc.payload = ClassificationPayload{it->second};
      break;
    }
    case Task::kVqa: {
      auto it = index.questions.find(source.image);
      doc.payload = VqaPayload{it == index.questions.end() ? std::vector<QaPair>{} : it->second};
      break;
    }
  }
  return doc;
}

std::vector<Document> load_dataset(const fs::path& root, Task task) {
  const DatasetIndex index = index_dataset(root, task);
  std::vector<Document> docs;
  docs.reserve(index.items.size());
  for (const auto& src : index.items) docs.push_back(load_document(index, src));
  return docs;
}

}  // namespace docshift
