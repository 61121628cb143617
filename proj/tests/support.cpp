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

#include "support.hpp"

#include <atomic>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "docshift/annotation.hpp"
#include "docshift/dataset.hpp"

#ifndef DOCSHIFT_TOOL_DIR
#define DOCSHIFT_TOOL_DIR "."
#endif

namespace docshift::testing {
namespace fs = std::filesystem;

TempDir::TempDir(const std::string& tag) {
  static std::atomic<int> counter{0};
  path_ = fs::temp_directory_path() /
          (tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
  fs::remove_all(path_);
  fs::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

namespace {

const std::vector<std::string> kVocabulary = {
    "DATE:", "TO:", "FROM:", "invoice", "receipt", "total", "amount", "houses", "code",
    "Brand", "Tobacco", "Research", "Company", "Phone", "Fax", "signature", "approved",
    "budget", "project", "number", "report", "cigarette", "market", "sales", "account",
    "(212)", "2023", "10:45", "$1,250.00", "#", "--", "No.", "R&D", "x", "A1B2"};

}  // namespace

Document synthetic_form(Rng& rng, const std::string& id, int width, int height, int entities) {
  Document doc;
  doc.id = id;
  doc.image_path = std::string(kImageDir) + "/" + id + ".png";
  doc.width = width;
  doc.height = height;
  const Label labels[] = {Label::kHeader, Label::kQuestion, Label::kAnswer, Label::kOther};
  int x = 12;
  int y = 10;
  const int line_height = 14;
  for (int e = 0; e < entities; ++e) {
    Entity ent;
    ent.id = e;
    ent.label = labels[(e + rng.below(2)) % 4];
    const int n_words = 1 + static_cast<int>(rng.below(3));
    for (int w = 0; w < n_words; ++w) {
      const std::string& text = kVocabulary[rng.below(kVocabulary.size())];
      const int wlen = 9 * static_cast<int>(text.size()) / 2 + 6;
      if (x + wlen > width - 10) {
        x = 12;
        y += line_height + 4;
      }
      if (y + line_height > height - 10) break;
      ent.words.push_back({text, {x, y, x + wlen, y + line_height}});
      x += wlen + 4 + static_cast<int>(rng.below(6));
    }
    if (ent.words.empty()) break;
    BoundingBox hull = ent.words.front().box;
    for (const auto& w : ent.words) hull = hull.united(w.box);
    ent.box = hull;
    ent.text = joined_text(ent);
    if (e > 0 && e % 2 == 0) ent.links.emplace_back(e - 1, e);
    doc.entities.push_back(std::move(ent));
    x += 10 + static_cast<int>(rng.below(30));
    if (rng.below(3) == 0) {
      x = 12;
      y += line_height + 8;
    }
  }
  return doc;
}

Image render_page(const Document& doc) {
  Image img(doc.width, doc.height, 3, 255);
  for (int x = 4; x < doc.width - 4; ++x) {
    for (int c = 0; c < 3; ++c) img.at(x, doc.height - 6, c) = 160;
  }
  for (const auto& e : doc.entities) {
    for (const auto& w : e.words) {
      // Glyph block inset by 2 px from the word box.
      for (int y = w.box.y1 + 2; y < w.box.y2 - 2; ++y) {
        for (int x = w.box.x1 + 2; x < w.box.x2 - 2; ++x) {
          const bool stroke = ((x - w.box.x1) % 5) < 3;
          for (int c = 0; c < 3; ++c) img.at(x, y, c) = stroke ? 20 : 255;
        }
      }
    }
  }
  return img;
}

void write_dataset(const fs::path& root, const std::vector<Document>& docs, Task task) {
  fs::create_directories(root / kAnnotationDir);
  fs::create_directories(root / kImageDir);
  for (const auto& d : docs) {
    write_text_file(root / kAnnotationDir / (d.id + ".json"), serialize_document(d));
    save_image(root / d.image_path, render_page(d));
  }
  if (task == Task::kClassification) write_text_file(root / kClassSidecar, format_class_sidecar(docs));
  if (task == Task::kVqa) write_text_file(root / kQaSidecar, format_qa_sidecar(docs));
}

std::vector<Document> synthetic_corpus(std::uint64_t seed, int n, Task task) {
  Rng rng(seed);
  std::vector<Document> docs;
  for (int i = 0; i < n; ++i) {
    char id[16];
    std::snprintf(id, sizeof id, "doc%03d", i);
    Document d = synthetic_form(rng, id, 360 + static_cast<int>(rng.below(80)),
                                280 + static_cast<int>(rng.below(60)), 6 + static_cast<int>(rng.below(6)));
    if (task == Task::kIe) d.payload = IePayload{};
    if (task == Task::kClassification) {
      d.payload = ClassificationPayload{static_cast<int>(rng.below(kNumDocumentClasses))};
    }
    if (task == Task::kVqa) {
      VqaPayload qa;
      qa.questions.push_back({"what is the total?", {d.entities.front().words.front().text}});
      qa.questions.push_back({"who sent it?", {"Research", "research dept"}});
      d.payload = qa;
    }
    if (task != Task::kIe) {
      for (auto& e : d.entities) e.label.reset();
    }
    docs.push_back(std::move(d));
  }
  return docs;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path tool_path(const std::string& name) { return fs::path(DOCSHIFT_TOOL_DIR) / name; }

}  // namespace docshift::testing
