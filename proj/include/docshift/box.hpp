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

#ifndef DOCSHIFT_BOX_HPP_
#define DOCSHIFT_BOX_HPP_

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <span>

namespace docshift {

// Integer rectangle [x1, y1, x2, y2]. In pixel space the covered pixels are
// the half-open range [x1, x2) x [y1, y2); normalized boxes use thousandths
// of the page size.
struct BoundingBox {
  int x1 = 0;
  int y1 = 0;
  int x2 = 0;
  int y2 = 0;

  int width() const { return x2 - x1; }
  int height() const { return y2 - y1; }
  std::int64_t area() const {
    return static_cast<std::int64_t>(width()) * height();
  }
  bool valid() const { return x1 <= x2 && y1 <= y2; }
  bool empty() const { return x1 >= x2 || y1 >= y2; }

  bool contains(const BoundingBox& o) const {
    return x1 <= o.x1 && y1 <= o.y1 && o.x2 <= x2 && o.y2 <= y2;
  }
  // Positive-area overlap. Boxes that only share an edge do not intersect.
  bool intersects(const BoundingBox& o) const {
    return std::max(x1, o.x1) < std::min(x2, o.x2) &&
           std::max(y1, o.y1) < std::min(y2, o.y2);
  }

  BoundingBox dilated(int dx, int dy) const {
    return {x1 - dx, y1 - dy, x2 + dx, y2 + dy};
  }
  BoundingBox translated(int dx, int dy) const {
    return {x1 + dx, y1 + dy, x2 + dx, y2 + dy};
  }
  BoundingBox united(const BoundingBox& o) const {
    return {std::min(x1, o.x1), std::min(y1, o.y1), std::max(x2, o.x2),
            std::max(y2, o.y2)};
  }
  BoundingBox clamped(int width, int height) const {
    return {std::clamp(x1, 0, width), std::clamp(y1, 0, height),
            std::clamp(x2, 0, width), std::clamp(y2, 0, height)};
  }

  std::array<int, 4> as_array() const { return {x1, y1, x2, y2}; }

  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
  friend auto operator<=>(const BoundingBox&, const BoundingBox&) = default;
};

// Union of all boxes, or nullopt for an empty list.
std::optional<BoundingBox> union_of(std::span<const BoundingBox> boxes);

// Scales a pixel box into the 0..1000 space of a `width` x `height` page.
// Rounds half up and clamps. Throws ParameterError on a zero dimension.
BoundingBox normalize_box(const BoundingBox& box, int width, int height);

}  // namespace docshift

#endif  // DOCSHIFT_BOX_HPP_
