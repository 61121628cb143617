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

#include "docshift/image_shift.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <iterator>
#include <numbers>

#include <spdlog/spdlog.h>

#include "docshift/errors.hpp"
#include "docshift/rng.hpp"

namespace docshift {
namespace {

std::uint8_t to_byte(double v) {
  return static_cast<std::uint8_t>(std::clamp(std::floor(v + 0.5), 0.0, 255.0));
}

// Bilinear sample with coordinates clamped to the image (border replicate).
double sample(const Image& img, double x, double y, int c) {
  x = std::clamp(x, 0.0, static_cast<double>(img.width - 1));
  y = std::clamp(y, 0.0, static_cast<double>(img.height - 1));
  const int x0 = static_cast<int>(std::floor(x));
  const int y0 = static_cast<int>(std::floor(y));
  const int x1 = std::min(x0 + 1, img.width - 1);
  const int y1 = std::min(y0 + 1, img.height - 1);
  const double fx = x - x0;
  const double fy = y - y0;
  const double top = img.at(x0, y0, c) * (1.0 - fx) + img.at(x1, y0, c) * fx;
  const double bottom = img.at(x0, y1, c) * (1.0 - fx) + img.at(x1, y1, c) * fx;
  return top * (1.0 - fy) + bottom * fy;
}

double sample_field(const DisplacementField& f, const std::vector<float>& channel,
                    double x, double y) {
  x = std::clamp(x, 0.0, static_cast<double>(f.width - 1));
  y = std::clamp(y, 0.0, static_cast<double>(f.height - 1));
  const int x0 = static_cast<int>(std::floor(x));
  const int y0 = static_cast<int>(std::floor(y));
  const int x1 = std::min(x0 + 1, f.width - 1);
  const int y1 = std::min(y0 + 1, f.height - 1);
  const double fx = x - x0;
  const double fy = y - y0;
  const double top = channel[f.index(x0, y0)] * (1.0 - fx) + channel[f.index(x1, y0)] * fx;
  const double bottom = channel[f.index(x0, y1)] * (1.0 - fx) + channel[f.index(x1, y1)] * fx;
  return top * (1.0 - fy) + bottom * fy;
}

// Solves the 8x8 system for the homography taking src[i] to dst[i].
std::array<double, 9> homography(const std::array<std::array<double, 2>, 4>& src,
                                 const std::array<std::array<double, 2>, 4>& dst) {
  double a[8][9] = {};
  for (int i = 0; i < 4; ++i) {
    const double x = src[i][0], y = src[i][1], u = dst[i][0], v = dst[i][1];
    double r0[9] = {x, y, 1, 0, 0, 0, -x * u, -y * u, u};
    double r1[9] = {0, 0, 0, x, y, 1, -x * v, -y * v, v};
    std::copy(std::begin(r0), std::end(r0), a[2 * i]);
    std::copy(std::begin(r1), std::end(r1), a[2 * i + 1]);
  }
  for (int col = 0; col < 8; ++col) {
    int pivot = col;
    for (int r = col + 1; r < 8; ++r) {
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    }
    if (std::abs(a[pivot][col]) < 1e-12) throw ParameterError("degenerate perspective warp");
    std::swap(a[col], a[pivot]);
    for (int r = 0; r < 8; ++r) {
      if (r == col) continue;
      const double factor = a[r][col] / a[col][col];
      for (int k = col; k < 9; ++k) a[r][k] -= factor * a[col][k];
    }
  }
  std::array<double, 9> h{};
  for (int i = 0; i < 8; ++i) h[i] = a[i][8] / a[i][i];
  h[8] = 1.0;
  return h;
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32(std::span<const std::uint8_t> in, std::size_t at) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(in[at + i]) << (8 * i);
  return v;
}

}  // namespace

std::size_t TextMask::count() const {
  return static_cast<std::size_t>(std::count_if(bits.begin(), bits.end(),
                                                [](std::uint8_t b) { return b != 0; }));
}

std::optional<int> otsu_threshold(const std::array<std::uint64_t, 256>& histogram) {
  long double total = 0, weighted = 0;
  for (int i = 0; i < 256; ++i) {
    total += histogram[i];
    weighted += static_cast<long double>(i) * histogram[i];
  }
  long double w0 = 0, s0 = 0, best = 0;
  int first = -1, last = -1;
  for (int t = 0; t < 255; ++t) {
    w0 += histogram[t];
    s0 += static_cast<long double>(t) * histogram[t];
    const long double w1 = total - w0;
    if (w0 == 0 || w1 == 0) continue;
    const long double diff = s0 / w0 - (weighted - s0) / w1;
    const long double between = w0 * w1 * diff * diff;
    if (between > best) {
      best = between;
      first = last = t;
    } else if (between == best && first >= 0 && last == t - 1) {
      last = t;
    }
  }
  if (first < 0) return std::nullopt;
  // Middle of a flat optimum (empty bins between the two modes).
  return (first + last) / 2;
}

std::uint8_t gray_level(const Image& img, int x, int y) { return to_byte(luma(img, x, y)); }

TextMask extract_text_mask(const Image& image, std::span<const BoundingBox> boxes,
                           MaskMethod method) {
  TextMask mask(image.width, image.height);
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    const BoundingBox& raw = boxes[i];
    if (raw.empty()) {
      spdlog::warn("text mask: skipping zero-area box {} [{},{},{},{}]", i, raw.x1, raw.y1,
                   raw.x2, raw.y2);
      continue;
    }
    const BoundingBox b = raw.clamped(image.width, image.height);
    if (b.empty()) {
      throw ValidationError("text mask: box " + std::to_string(i) + " [" +
                            std::to_string(raw.x1) + "," + std::to_string(raw.y1) + "," +
                            std::to_string(raw.x2) + "," + std::to_string(raw.y2) +
                            "] lies outside the " + std::to_string(image.width) + "x" +
                            std::to_string(image.height) + " image");
    }
    if (method == MaskMethod::kWholeBox) {
      for (int y = b.y1; y < b.y2; ++y)
        for (int x = b.x1; x < b.x2; ++x) mask.set(x, y, true);
      continue;
    }
    std::array<std::uint64_t, 256> hist{};
    for (int y = b.y1; y < b.y2; ++y)
      for (int x = b.x1; x < b.x2; ++x) ++hist[gray_level(image, x, y)];
    const auto t = otsu_threshold(hist);
    if (!t) continue;
    std::uint64_t dark = 0;
    for (int g = 0; g <= *t; ++g) dark += hist[g];
    const bool text_is_dark = 2 * dark <= static_cast<std::uint64_t>(b.area());
    for (int y = b.y1; y < b.y2; ++y) {
      for (int x = b.x1; x < b.x2; ++x) {
        const bool is_dark = gray_level(image, x, y) <= *t;
        if (is_dark == text_is_dark) mask.set(x, y, true);
      }
    }
  }
  return mask;
}

Image resize_bilinear(const Image& src, int width, int height) {
  if (width <= 0 || height <= 0 || src.width <= 0 || src.height <= 0) {
    throw ParameterError("resize_bilinear: empty image or target size");
  }
  Image out(width, height, src.channels);
  const double sx = static_cast<double>(src.width) / width;
  const double sy = static_cast<double>(src.height) / height;
  for (int y = 0; y < height; ++y) {
    const double fy = (y + 0.5) * sy - 0.5;
    for (int x = 0; x < width; ++x) {
      const double fx = (x + 0.5) * sx - 0.5;
      for (int c = 0; c < src.channels; ++c) out.at(x, y, c) = to_byte(sample(src, fx, fy, c));
    }
  }
  return out;
}

Image replace_background(const Image& document, const TextMask& mask, const Image& natural) {
  if (mask.width != document.width || mask.height != document.height) {
    throw ValidationError("replace_background: mask is " + std::to_string(mask.width) + "x" +
                          std::to_string(mask.height) + ", document is " +
                          std::to_string(document.width) + "x" +
                          std::to_string(document.height));
  }
  const Image doc = to_rgb(document);
  Image out = resize_bilinear(to_rgb(natural), document.width, document.height);
  for (int y = 0; y < out.height; ++y) {
    for (int x = 0; x < out.width; ++x) {
      if (!mask.at(x, y)) continue;
      for (int c = 0; c < 3; ++c) out.at(x, y, c) = doc.at(x, y, c);
    }
  }
  return out;
}

DisplacementField synthesize_displacement_field(int width, int height, double amplitude,
                                                double wavelength,
                                                double perspective_strength,
                                                std::uint64_t seed) {
  if (width <= 0 || height <= 0) throw ParameterError("displacement field needs a positive size");
  if (!(wavelength > 0.0)) {
    throw ParameterError("wavelength must be positive, got " + std::to_string(wavelength));
  }
  if (!(amplitude >= 0.0)) {
    throw ParameterError("amplitude must be non-negative, got " + std::to_string(amplitude));
  }
  if (!(perspective_strength >= 0.0 && perspective_strength < 0.25)) {
    throw ParameterError("perspective strength must lie in [0, 0.25), got " +
                         std::to_string(perspective_strength));
  }
  DisplacementField field(width, height);
  const double k = 2.0 * std::numbers::pi / wavelength;

  std::optional<std::array<double, 9>> h;
  if (perspective_strength > 0.0) {
    Rng rng(seed);
    const std::array<std::array<double, 2>, 4> corners = {{{0, 0}, {1, 0}, {0, 1}, {1, 1}}};
    auto jittered = corners;
    for (auto& c : jittered) {
      for (auto& v : c) v += (2.0 * rng.unit() - 1.0) * perspective_strength;
    }
    h = homography(corners, jittered);
  }

  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      double dx = amplitude * std::sin(k * y);
      double dy = amplitude * std::sin(k * x);
      if (h) {
        const auto& m = *h;
        const double u = static_cast<double>(x) / width;
        const double v = static_cast<double>(y) / height;
        const double w = m[6] * u + m[7] * v + m[8];
        dx += ((m[0] * u + m[1] * v + m[2]) / w - u) * width;
        dy += ((m[3] * u + m[4] * v + m[5]) / w - v) * height;
      }
      field.dx[field.index(x, y)] = static_cast<float>(dx);
      field.dy[field.index(x, y)] = static_cast<float>(dy);
    }
  }
  return field;
}

std::vector<std::uint8_t> encode_displacement_field(const DisplacementField& f) {
  std::vector<std::uint8_t> out = {'D', 'F', 'L', 'D'};
  out.reserve(12 + 8 * f.dx.size());
  put_u32(out, static_cast<std::uint32_t>(f.width));
  put_u32(out, static_cast<std::uint32_t>(f.height));
  for (float v : f.dx) put_u32(out, std::bit_cast<std::uint32_t>(v));
  for (float v : f.dy) put_u32(out, std::bit_cast<std::uint32_t>(v));
  return out;
}

DisplacementField decode_displacement_field(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 12 || bytes[0] != 'D' || bytes[1] != 'F' || bytes[2] != 'L' ||
      bytes[3] != 'D') {
    throw ParseError("DFLD", "missing DFLD magic");
  }
  const std::uint32_t w = get_u32(bytes, 4);
  const std::uint32_t h = get_u32(bytes, 8);
  const std::uint64_t n = std::uint64_t{w} * h;
  if (w == 0 || h == 0 || bytes.size() != 12 + 8 * n) {
    throw ParseError("DFLD", "size " + std::to_string(bytes.size()) + " does not match " +
                                 std::to_string(w) + "x" + std::to_string(h) + " field");
  }
  DisplacementField f(static_cast<int>(w), static_cast<int>(h));
  for (std::uint64_t i = 0; i < n; ++i) {
    f.dx[i] = std::bit_cast<float>(get_u32(bytes, 12 + 4 * i));
    f.dy[i] = std::bit_cast<float>(get_u32(bytes, 12 + 4 * (n + i)));
    if (!std::isfinite(f.dx[i]) || !std::isfinite(f.dy[i])) {
      throw ParseError("DFLD", "non-finite offset at " + std::to_string(i));
    }
  }
  return f;
}

void write_displacement_field(const std::filesystem::path& path, const DisplacementField& f) {
  const auto bytes = encode_displacement_field(f);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("cannot write " + path.string());
}

DisplacementField read_displacement_field(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return decode_displacement_field(bytes);
}

WarpResult warp(const Image& image, std::span<const BoundingBox> boxes,
                const DisplacementField& field) {
  if (field.width != image.width || field.height != image.height) {
    throw ValidationError("warp: field is " + std::to_string(field.width) + "x" +
                          std::to_string(field.height) + ", image is " +
                          std::to_string(image.width) + "x" + std::to_string(image.height));
  }
  WarpResult out{Image(image.width, image.height, image.channels), {}};
  for (int y = 0; y < image.height; ++y) {
    for (int x = 0; x < image.width; ++x) {
      const std::size_t i = field.index(x, y);
      const double sx = x + static_cast<double>(field.dx[i]);
      const double sy = y + static_cast<double>(field.dy[i]);
      for (int c = 0; c < image.channels; ++c) out.image.at(x, y, c) = to_byte(sample(image, sx, sy, c));
    }
  }

  // Content at source point q lands on the output point p with
  // p + d(p) = q; solved by fixed-point iteration.
  auto locate = [&](double qx, double qy) {
    double px = qx, py = qy;
    for (int it = 0; it < 50; ++it) {
      const double nx = qx - sample_field(field, field.dx, px, py);
      const double ny = qy - sample_field(field, field.dy, px, py);
      const bool done = std::abs(nx - px) < 1e-6 && std::abs(ny - py) < 1e-6;
      px = nx;
      py = ny;
      if (done) break;
    }
    return std::array<double, 2>{px, py};
  };

  out.boxes.reserve(boxes.size());
  for (const auto& b : boxes) {
    double lo_x = INFINITY, lo_y = INFINITY, hi_x = -INFINITY, hi_y = -INFINITY;
    for (const auto& [cx, cy] : {std::array<int, 2>{b.x1, b.y1}, std::array<int, 2>{b.x2, b.y1},
                                 std::array<int, 2>{b.x1, b.y2}, std::array<int, 2>{b.x2, b.y2}}) {
      const auto p = locate(cx, cy);
      lo_x = std::min(lo_x, p[0]);
      lo_y = std::min(lo_y, p[1]);
      hi_x = std::max(hi_x, p[0]);
      hi_y = std::max(hi_y, p[1]);
    }
    // Snap near-integers so an exact field produces exact boxes.
    auto snap_floor = [](double v) { return static_cast<int>(std::floor(v + 1e-6)); };
    auto snap_ceil = [](double v) { return static_cast<int>(std::ceil(v - 1e-6)); };
    BoundingBox mapped{snap_floor(lo_x), snap_floor(lo_y), snap_ceil(hi_x), snap_ceil(hi_y)};
    out.boxes.push_back(mapped.clamped(image.width, image.height));
  }
  return out;
}

}  // namespace docshift
