// Copyright 2026 The pbrsynth Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pbrsynth/common/math.hpp"

namespace pbrsynth::render {

// Linear RGB radiance, row-major from the top-left pixel.
struct HdrImage {
  int width = 0;
  int height = 0;
  std::vector<float> rgb;

  HdrImage() = default;
  HdrImage(int w, int h) : width(w), height(h), rgb(static_cast<std::size_t>(w) * h * 3, 0.0f) {}
  Vec3 At(int x, int y) const {
    const std::size_t i = (static_cast<std::size_t>(y) * width + x) * 3;
    return {rgb[i], rgb[i + 1], rgb[i + 2]};
  }
  void Set(int x, int y, const Vec3& v) {
    const std::size_t i = (static_cast<std::size_t>(y) * width + x) * 3;
    rgb[i] = static_cast<float>(v.x());
    rgb[i + 1] = static_cast<float>(v.y());
    rgb[i + 2] = static_cast<float>(v.z());
  }
};

// 8-bit image with 1 (gray) or 3 (sRGB) channels, row-major from the top.
struct LdrImage {
  int width = 0;
  int height = 0;
  int channels = 3;
  std::vector<uint8_t> data;

  LdrImage() = default;
  LdrImage(int w, int h, int c) : width(w), height(h), channels(c), data(static_cast<std::size_t>(w) * h * c, 0) {}
  uint8_t& at(int x, int y, int c) { return data[(static_cast<std::size_t>(y) * width + x) * channels + c]; }
  uint8_t at(int x, int y, int c) const { return data[(static_cast<std::size_t>(y) * width + x) * channels + c]; }
};

// sRGB transfer function on [0, 1].
double SrgbEncode(double linear);
// Exposure scale, Reinhard x / (1 + x) per channel, sRGB encoding, then
// quantization with halves rounded up.
uint8_t ToneMapValue(double hdr, double exposure);
LdrImage ToneMap(const HdrImage& hdr, double exposure);

// Encoded PNG bytes; deterministic for identical images.
std::vector<uint8_t> EncodePng(const LdrImage& image);
LdrImage DecodePng(const std::vector<uint8_t>& bytes);
LdrImage DecodeJpeg(const std::vector<uint8_t>& bytes);
// Portable float map, little-endian, rows stored bottom to top.
std::vector<uint8_t> EncodePfm(const HdrImage& image);
HdrImage DecodePfm(const std::vector<uint8_t>& bytes);

void WritePng(const std::string& path, const LdrImage& image);
void WritePfm(const std::string& path, const HdrImage& image);
// PNG or JPEG chosen by file signature; the result always has 3 channels.
LdrImage ReadImage(const std::string& path);

// Bilinear resampling with pixel centers aligned, rounded to bytes.
LdrImage ResizeBilinear(const LdrImage& image, int width, int height);

}  // namespace pbrsynth::render
