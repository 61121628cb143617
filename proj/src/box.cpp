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

#include "docshift/box.hpp"

#include <cstdint>

#include "docshift/errors.hpp"

namespace docshift {
namespace {

std::int64_t floor_div(std::int64_t n, std::int64_t d) {
  std::int64_t q = n / d;
  if ((n % d != 0) && ((n < 0) != (d < 0))) --q;
  return q;
}

// round_half_up(value * 1000 / extent), computed exactly in integers.
int scale_coordinate(int value, int extent) {
  const std::int64_t scaled =
      floor_div(2 * std::int64_t{value} * 1000 + extent, 2 * std::int64_t{extent});
  return static_cast<int>(std::clamp<std::int64_t>(scaled, 0, 1000));
}

}  // namespace

std::optional<BoundingBox> union_of(std::span<const BoundingBox> boxes) {
  if (boxes.empty()) return std::nullopt;
  BoundingBox out = boxes.front();
  for (const auto& b : boxes.subspan(1)) out = out.united(b);
  return out;
}

BoundingBox normalize_box(const BoundingBox& box, int width, int height) {
  if (width <= 0 || height <= 0) {
    throw ParameterError("normalize_box: page dimensions must be positive, got " +
                         std::to_string(width) + "x" + std::to_string(height));
  }
  return {scale_coordinate(box.x1, width), scale_coordinate(box.y1, height),
          scale_coordinate(box.x2, width), scale_coordinate(box.y2, height)};
}

}  // namespace docshift
