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

#ifndef DOCSHIFT_ANNOTATION_HPP_
#define DOCSHIFT_ANNOTATION_HPP_

#include <string>
#include <string_view>

#include "docshift/document.hpp"

namespace docshift {

struct ImageRef {
  std::string doc_id;
  std::string path;
  int width = 0;
  int height = 0;
};

// Reads one FUNSD-style annotation record:
//
//   {"form": [{"id": 0, "box": [x1,y1,x2,y2], "text": "...",
//              "label": "question", "linking": [[0, 1]],
//              "words": [{"box": [...], "text": "..."}]}]}
//
// Word boxes are clamped to the page; words with empty text are dropped;
// entity boxes become the union of their word boxes. With `require_labels`
// every entity must carry a label from the closed set (information
// extraction); otherwise labels are optional.
Document parse_ie_document(std::string_view bytes, const ImageRef& image,
                           bool require_labels = true);

// Inverse of parse_ie_document. Deterministic: identical documents give
// identical bytes.
std::string serialize_document(const Document& doc);

}  // namespace docshift

#endif  // DOCSHIFT_ANNOTATION_HPP_
