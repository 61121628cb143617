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

#ifndef DOCSHIFT_IMAGE_SHIFT_HPP_
#define DOCSHIFT_IMAGE_SHIFT_HPP_

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "docshift/box.hpp"
#include "docshift/image.hpp"

namespace docshift {

struct TextMask {
  int width = 0;
  int height = 0;
  // One byte per pixel, row-major; nonzero marks text.
  std::vector<std::uint8_t> bits;

  TextMask() = default;
  TextMask(int w, int h, bool value = false)
      : width(w), height(h), bits(static_cast<std::size_t>(w) * h, value ? 1 : 0) {}

  bool at(int x, int y) const { return bits[static_cast<std::size_t>(y) * width + x] != 0; }
  void set(int x, int y, bool v) { bits[static_cast<std::size_t>(y) * width + x] = v ? 1 : 0; }
  std::size_t count() const;
};

enum class MaskMethod {
  // Per-box Otsu threshold; the darker class is text unless it covers more
  // than half the box.
  kOtsu,
  // Every pixel inside a word box is text.
  kWholeBox,
};

// Otsu threshold of a 256-bin histogram: the largest t such that splitting
// into [0, t] and (t, 255] maximizes between-class variance. nullopt when
// no split separates anything (a single occupied bin).
std::optional<int> otsu_threshold(const std::array<std::uint64_t, 256>& histogram);

// Rounded luma in 0..255.
std::uint8_t gray_level(const Image& img, int x, int y);

// Throws ValidationError for a box lying entirely off the image. Zero-area
// boxes are skipped with a warning.
TextMask extract_text_mask(const Image& image, std::span<const BoundingBox> boxes,
                           MaskMethod method = MaskMethod::kOtsu);

// Bilinear resize with pixel-center alignment and edge clamping.
Image resize_bilinear(const Image& src, int width, int height);

// Text pixels from `document` over `natural` resized to the page. The
// result always has three channels.
Image replace_background(const Image& document, const TextMask& mask, const Image& natural);

// Source-coordinate lookup field: output(p) = input(p + (dx, dy)(p)).
struct DisplacementField {
  int width = 0;
  int height = 0;
  std::vector<float> dx;
  std::vector<float> dy;

  DisplacementField() = default;
  DisplacementField(int w, int h)
      : width(w), height(h),
        dx(static_cast<std::size_t>(w) * h, 0.0f),
        dy(static_cast<std::size_t>(w) * h, 0.0f) {}

  std::size_t index(int x, int y) const { return static_cast<std::size_t>(y) * width + x; }

  friend bool operator==(const DisplacementField&, const DisplacementField&) = default;
};

// Sinusoidal warp dx = A sin(2 pi y / L), dy = A sin(2 pi x / L) plus the
// displacement of a random homography that moves each page corner by at most
// perspective_strength times the page size along each axis.
DisplacementField synthesize_displacement_field(int width, int height, double amplitude,
                                                double wavelength,
                                                double perspective_strength,
                                                std::uint64_t seed);

// Binary "DFLD" file: magic, u32 width, u32 height, then width*height
// float32 dx values row-major followed by the dy values, little-endian.
void write_displacement_field(const std::filesystem::path& path, const DisplacementField& f);
DisplacementField read_displacement_field(const std::filesystem::path& path);
std::vector<std::uint8_t> encode_displacement_field(const DisplacementField& f);
DisplacementField decode_displacement_field(std::span<const std::uint8_t> bytes);

struct WarpResult {
  Image image;
  std::vector<BoundingBox> boxes;
};

// Resamples the image through the field (bilinear, border replicated) and
// maps every box to the hull of its corners' positions in the output.
WarpResult warp(const Image& image, std::span<const BoundingBox> boxes,
                const DisplacementField& field);

}  // namespace docshift

#endif  // DOCSHIFT_IMAGE_SHIFT_HPP_
