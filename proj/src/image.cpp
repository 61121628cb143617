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

#include "docshift/image.hpp"

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include "docshift/errors.hpp"

namespace docshift {

double luma(const Image& img, int x, int y) {
  if (img.channels == 1) return img.at(x, y);
  return 0.299 * img.at(x, y, 0) + 0.587 * img.at(x, y, 1) +
         0.114 * img.at(x, y, 2);
}

Image to_rgb(const Image& img) {
  if (img.channels == 3) return img;
  Image out(img.width, img.height, 3);
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      const auto v = img.at(x, y);
      for (int c = 0; c < 3; ++c) out.at(x, y, c) = v;
    }
  }
  return out;
}

Image load_image(const std::filesystem::path& path) {
  cv::Mat mat = cv::imread(path.string(), cv::IMREAD_ANYDEPTH | cv::IMREAD_ANYCOLOR);
  if (mat.empty()) throw IoError("cannot read image " + path.string());
  if (mat.depth() != CV_8U) {
    const double scale = mat.depth() == CV_16U ? 1.0 / 257.0 : 1.0;
    mat.convertTo(mat, CV_8U, scale);
  }
  const int channels = mat.channels() == 1 ? 1 : 3;
  Image img(mat.cols, mat.rows, channels);
  for (int y = 0; y < mat.rows; ++y) {
    const std::uint8_t* row = mat.ptr<std::uint8_t>(y);
    for (int x = 0; x < mat.cols; ++x) {
      if (channels == 1) {
        img.at(x, y) = row[x];
      } else {
        // OpenCV stores BGR(A).
        const std::uint8_t* px = row + static_cast<std::size_t>(x) * mat.channels();
        img.at(x, y, 0) = px[2];
        img.at(x, y, 1) = px[1];
        img.at(x, y, 2) = px[0];
      }
    }
  }
  return img;
}

void save_image(const std::filesystem::path& path, const Image& img) {
  cv::Mat mat(img.height, img.width, img.channels == 1 ? CV_8UC1 : CV_8UC3);
  for (int y = 0; y < img.height; ++y) {
    std::uint8_t* row = mat.ptr<std::uint8_t>(y);
    for (int x = 0; x < img.width; ++x) {
      if (img.channels == 1) {
        row[x] = img.at(x, y);
      } else {
        row[3 * x + 0] = img.at(x, y, 2);
        row[3 * x + 1] = img.at(x, y, 1);
        row[3 * x + 2] = img.at(x, y, 0);
      }
    }
  }
  std::vector<int> params;
  const auto ext = path.extension().string();
  if (ext == ".jpg" || ext == ".jpeg" || ext == ".JPG" || ext == ".JPEG") {
    params = {cv::IMWRITE_JPEG_QUALITY, 95};
  }
  bool ok = false;
  try {
    ok = cv::imwrite(path.string(), mat, params);
  } catch (const cv::Exception& e) {
    throw IoError("cannot write image " + path.string() + ": " + e.what());
  }
  if (!ok) throw IoError("cannot write image " + path.string());
}

}  // namespace docshift
