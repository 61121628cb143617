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

#ifndef DOCSHIFT_TESTS_SUPPORT_HPP_
#define DOCSHIFT_TESTS_SUPPORT_HPP_

#include <filesystem>
#include <string>
#include <vector>

#include "docshift/document.hpp"
#include "docshift/image.hpp"
#include "docshift/rng.hpp"

namespace docshift::testing {

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag = "docshift");
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& rel) const { return path_ / rel; }

 private:
  std::filesystem::path path_;
};

// A form-like page: entities laid out on text lines, each word a box of
// roughly 9 px per character. Labels cycle through the closed set; some
// words carry digits and punctuation.
Document synthetic_form(Rng& rng, const std::string& id, int width = 400, int height = 300,
                        int entities = 8);

// White page with a dark glyph block inside every word box and a thin gray
// frame line, so Otsu, background estimation and moves have something to do.
Image render_page(const Document& doc);

// Writes annotations/, images/ (PNG) and the task sidecar.
void write_dataset(const std::filesystem::path& root, const std::vector<Document>& docs,
                   Task task);

// n synthetic documents with ids doc000, doc001, ...
std::vector<Document> synthetic_corpus(std::uint64_t seed, int n, Task task = Task::kIe);

std::string read_file(const std::filesystem::path& p);

// Path of a built helper executable (stub_oracle, docshift).
std::filesystem::path tool_path(const std::string& name);

}  // namespace docshift::testing

#endif  // DOCSHIFT_TESTS_SUPPORT_HPP_
