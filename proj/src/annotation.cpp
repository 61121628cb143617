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

#include "docshift/annotation.hpp"

#include <cmath>
#include "json.hpp"

#include "docshift/errors.hpp"

namespace docshift {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

int parse_coordinate(const json& v, const std::string& path) {
  if (v.is_number_integer()) return v.get<int>();
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw ParseError(path, "non-finite coordinate");
    return static_cast<int>(std::lround(d));
  }
  throw ParseError(path, "coordinate must be a number");
}

BoundingBox parse_box(const json& v, const std::string& path) {
  if (!v.is_array() || v.size() != 4) {
    throw ParseError(path, "box must be an array of four numbers");
  }
  BoundingBox b{parse_coordinate(v[0], path + "[0]"),
                parse_coordinate(v[1], path + "[1]"),
                parse_coordinate(v[2], path + "[2]"),
                parse_coordinate(v[3], path + "[3]")};
  if (b.x2 < b.x1) {
    throw ValidationError(path + ": x2 < x1 in box [" + std::to_string(b.x1) +
                          "," + std::to_string(b.y1) + "," +
                          std::to_string(b.x2) + "," + std::to_string(b.y2) + "]");
  }
  if (b.y2 < b.y1) {
    throw ValidationError(path + ": y2 < y1 in box [" + std::to_string(b.x1) +
                          "," + std::to_string(b.y1) + "," +
                          std::to_string(b.x2) + "," + std::to_string(b.y2) + "]");
  }
  return b;
}

std::string parse_text(const json& obj, const std::string& path) {
  auto it = obj.find("text");
  if (it == obj.end() || it->is_null()) return {};
  if (!it->is_string()) throw ParseError(path + ".text", "text must be a string");
  return it->get<std::string>();
}

bool blank(const std::string& s) {
  return s.find_first_not_of(" \t\r\n") == std::string::npos;
}

ordered_json box_json(const BoundingBox& b) {
  return ordered_json::array({b.x1, b.y1, b.x2, b.y2});
}

}  // namespace

Document parse_ie_document(std::string_view bytes, const ImageRef& image,
                           bool require_labels) {
  json root;
  try {
    root = json::parse(bytes);
  } catch (const json::parse_error& e) {
    throw ParseError("$", std::string("invalid JSON: ") + e.what());
  }
  if (!root.is_object()) throw ParseError("$", "record must be an object");
  auto form = root.find("form");
  if (form == root.end() || !form->is_array()) {
    throw ParseError("form", "missing 'form' array");
  }
  if (image.width <= 0 || image.height <= 0) {
    throw ValidationError("document '" + image.doc_id +
                          "': page dimensions must be positive");
  }

  Document doc;
  doc.id = image.doc_id;
  doc.image_path = image.path;
  doc.width = image.width;
  doc.height = image.height;

  for (std::size_t i = 0; i < form->size(); ++i) {
    const std::string path = "form[" + std::to_string(i) + "]";
    const json& rec = (*form)[i];
    if (!rec.is_object()) throw ParseError(path, "entity must be an object");

    Entity e;
    if (auto id = rec.find("id"); id != rec.end()) {
      if (!id->is_number_integer()) throw ParseError(path + ".id", "id must be an integer");
      e.id = id->get<int>();
    } else {
      e.id = static_cast<int>(i);
    }

    if (auto label = rec.find("label"); label != rec.end() && !label->is_null()) {
      if (!label->is_string()) throw ParseError(path + ".label", "label must be a string");
      const auto name = label->get<std::string>();
      e.label = parse_label(name);
      if (!e.label) throw ValidationError(path + ".label: unknown label '" + name + "'");
    } else if (require_labels) {
      throw ValidationError(path + ": missing label");
    }

    if (auto words = rec.find("words"); words != rec.end()) {
      if (!words->is_array()) throw ParseError(path + ".words", "words must be an array");
      for (std::size_t j = 0; j < words->size(); ++j) {
        const std::string wpath = path + ".words[" + std::to_string(j) + "]";
        const json& w = (*words)[j];
        if (!w.is_object()) throw ParseError(wpath, "word must be an object");
        auto wbox = w.find("box");
        if (wbox == w.end()) throw ParseError(wpath + ".box", "missing box");
        Word word{parse_text(w, wpath), parse_box(*wbox, wpath + ".box")};
        if (blank(word.text)) continue;
        word.box = word.box.clamped(doc.width, doc.height);
        e.words.push_back(std::move(word));
      }
    }

    if (auto links = rec.find("linking"); links != rec.end()) {
      if (!links->is_array()) throw ParseError(path + ".linking", "linking must be an array");
      for (std::size_t j = 0; j < links->size(); ++j) {
        const json& l = (*links)[j];
        if (!l.is_array() || l.size() != 2 || !l[0].is_number_integer() ||
            !l[1].is_number_integer()) {
          throw ParseError(path + ".linking[" + std::to_string(j) + "]",
                           "link must be a pair of integers");
        }
        e.links.emplace_back(l[0].get<int>(), l[1].get<int>());
      }
    }

    if (!e.words.empty()) {
      BoundingBox hull = e.words.front().box;
      for (const auto& w : e.words) hull = hull.united(w.box);
      e.box = hull;
      e.text = joined_text(e);
    } else {
      if (auto box = rec.find("box"); box != rec.end()) {
        e.box = parse_box(*box, path + ".box").clamped(doc.width, doc.height);
      }
      e.text = parse_text(rec, path);
    }
    doc.entities.push_back(std::move(e));
  }
  check_document(doc);
  return doc;
}

std::string serialize_document(const Document& doc) {
  ordered_json form = ordered_json::array();
  for (const auto& e : doc.entities) {
    ordered_json rec;
    rec["box"] = box_json(e.box);
    rec["text"] = e.words.empty() ? e.text : joined_text(e);
    if (e.label) rec["label"] = std::string(label_name(*e.label));
    ordered_json words = ordered_json::array();
    for (const auto& w : e.words) {
      ordered_json wj;
      wj["box"] = box_json(w.box);
      wj["text"] = w.text;
      words.push_back(std::move(wj));
    }
    rec["words"] = std::move(words);
    ordered_json links = ordered_json::array();
    for (const auto& [a, b] : e.links) links.push_back(ordered_json::array({a, b}));
    rec["linking"] = std::move(links);
    rec["id"] = e.id;
    form.push_back(std::move(rec));
  }
  ordered_json root;
  root["form"] = std::move(form);
  return root.dump(1, ' ', false, ordered_json::error_handler_t::strict) + "\n";
}

}  // namespace docshift
