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

#ifndef DOCSHIFT_IMAGE_HPP_
#define DOCSHIFT_IMAGE_HPP_

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

namespace docshift {

// 8-bit interleaved raster, 1 (gray) or 3 (RGB) channels, row-major.
struct Image {
  int width = 0;
  int height = 0;
  int channels = 3;
  std::vector<std::uint8_t> data;

  Image() = default;
  Image(int w, int h, int c, std::uint8_t fill = 0)
      : width(w), height(h), channels(c),
        data(static_cast<std::size_t>(w) * h * c, fill) {}

  std::size_t index(int x, int y, int c = 0) const {
    return (static_cast<std::size_t>(y) * width + x) * channels + c;
  }
  std::uint8_t& at(int x, int y, int c = 0) { return data[index(x, y, c)]; }
  std::uint8_t at(int x, int y, int c = 0) const { return data[index(x, y, c)]; }

  friend bool operator==(const Image&, const Image&) = default;
};

// Luma with weights (0.299, 0.587, 0.114).
double luma(const Image& img, int x, int y);

// Returns a 3-channel copy (gray replicated) or the image itself.
Image to_rgb(const Image& img);

// Decodes any raster format OpenCV understands. Alpha is dropped and deeper
// samples are scaled to 8 bits. Throws IoError when unreadable.
Image load_image(const std::filesystem::path& path);
// Encoder chosen by extension; JPEG quality is fixed at 95.
void save_image(const std::filesystem::path& path, const Image& img);

}  // namespace docshift

#endif  // DOCSHIFT_IMAGE_HPP_
