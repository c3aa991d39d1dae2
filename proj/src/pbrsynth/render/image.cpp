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

#include "pbrsynth/render/image.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <cctype>
#include <csetjmp>

#include <jpeglib.h>
#include <png.h>

#include "pbrsynth/common/error.hpp"
#include "pbrsynth/common/fileio.hpp"

namespace pbrsynth::render {

double SrgbEncode(double linear) {
  const double c = std::clamp(linear, 0.0, 1.0);
  return c <= 0.0031308 ? 12.92 * c : 1.055 * std::pow(c, 1.0 / 2.4) - 0.055;
}

uint8_t ToneMapValue(double hdr, double exposure) {
  const double v = std::max(0.0, hdr * exposure);
  const double mapped = v / (1.0 + v);
  const double q = std::floor(255.0 * SrgbEncode(mapped) + 0.5);
  return static_cast<uint8_t>(std::clamp(q, 0.0, 255.0));
}

LdrImage ToneMap(const HdrImage& hdr, double exposure) {
  LdrImage out(hdr.width, hdr.height, 3);
  for (std::size_t i = 0; i < hdr.rgb.size(); ++i) out.data[i] = ToneMapValue(hdr.rgb[i], exposure);
  return out;
}

namespace {

void PngWriteData(png_structp png, png_bytep data, png_size_t length) {
  auto* out = static_cast<std::vector<uint8_t>*>(png_get_io_ptr(png));
  out->insert(out->end(), data, data + length);
}

void PngFlush(png_structp) {}

[[noreturn]] void PngError(png_structp, png_const_charp msg) { throw Error(ErrorCode::kParse, std::string("png: ") + msg); }
void PngWarning(png_structp, png_const_charp) {}

struct PngReadState {
  const std::vector<uint8_t>* bytes;
  std::size_t offset;
};

void PngReadData(png_structp png, png_bytep data, png_size_t length) {
  auto* st = static_cast<PngReadState*>(png_get_io_ptr(png));
  if (st->offset + length > st->bytes->size()) png_error(png, "truncated data");
  std::memcpy(data, st->bytes->data() + st->offset, length);
  st->offset += length;
}

}  // namespace

std::vector<uint8_t> EncodePng(const LdrImage& image) {
  if (image.channels != 1 && image.channels != 3) Fail(ErrorCode::kInvalidArgument, "png encoding needs 1 or 3 channels");
  std::vector<uint8_t> out;
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, PngError, PngWarning);
  if (!png) Fail(ErrorCode::kInternal, "png_create_write_struct failed");
  png_infop info = png_create_info_struct(png);
  try {
    png_set_write_fn(png, &out, PngWriteData, PngFlush);
    png_set_IHDR(png, info, image.width, image.height, 8, image.channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_set_compression_level(png, 6);
    png_write_info(png, info);
    const std::size_t stride = static_cast<std::size_t>(image.width) * image.channels;
    for (int y = 0; y < image.height; ++y) {
      png_write_row(png, const_cast<png_bytep>(image.data.data() + y * stride));
    }
    png_write_end(png, nullptr);
  } catch (...) {
    png_destroy_write_struct(&png, &info);
    throw;
  }
  png_destroy_write_struct(&png, &info);
  return out;
}

LdrImage DecodePng(const std::vector<uint8_t>& bytes) {
  if (bytes.size() < 8 || png_sig_cmp(bytes.data(), 0, 8) != 0) Fail(ErrorCode::kParse, "not a png file");
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, PngError, PngWarning);
  if (!png) Fail(ErrorCode::kInternal, "png_create_read_struct failed");
  png_infop info = png_create_info_struct(png);
  PngReadState st{&bytes, 0};
  LdrImage out;
  try {
    png_set_read_fn(png, &st, PngReadData);
    png_read_info(png, info);
    png_set_expand(png);
    png_set_strip_16(png);
    png_set_strip_alpha(png);
    const int color = png_get_color_type(png, info);
    png_read_update_info(png, info);
    const int channels = png_get_channels(png, info);
    (void)color;
    out = LdrImage(static_cast<int>(png_get_image_width(png, info)), static_cast<int>(png_get_image_height(png, info)), channels);
    std::vector<png_bytep> rows(out.height);
    for (int y = 0; y < out.height; ++y) rows[y] = out.data.data() + static_cast<std::size_t>(y) * out.width * channels;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
  } catch (...) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw;
  }
  png_destroy_read_struct(&png, &info, nullptr);
  return out;
}

namespace {

struct JpegErrorManager {
  jpeg_error_mgr base;
  std::jmp_buf jump;
  char message[JMSG_LENGTH_MAX];
};

void JpegErrorExit(j_common_ptr cinfo) {
  auto* err = reinterpret_cast<JpegErrorManager*>(cinfo->err);
  (*cinfo->err->format_message)(cinfo, err->message);
  std::longjmp(err->jump, 1);
}

}  // namespace

LdrImage DecodeJpeg(const std::vector<uint8_t>& bytes) {
  jpeg_decompress_struct cinfo;
  JpegErrorManager err;
  cinfo.err = jpeg_std_error(&err.base);
  err.base.error_exit = JpegErrorExit;
  LdrImage out;
  if (setjmp(err.jump)) {
    jpeg_destroy_decompress(&cinfo);
    Fail(ErrorCode::kParse, std::string("jpeg: ") + err.message);
  }
  jpeg_create_decompress(&cinfo);
  jpeg_mem_src(&cinfo, bytes.data(), static_cast<unsigned long>(bytes.size()));
  jpeg_read_header(&cinfo, TRUE);
  cinfo.out_color_space = JCS_RGB;
  jpeg_start_decompress(&cinfo);
  out = LdrImage(static_cast<int>(cinfo.output_width), static_cast<int>(cinfo.output_height), 3);
  while (cinfo.output_scanline < cinfo.output_height) {
    JSAMPROW row = out.data.data() + static_cast<std::size_t>(cinfo.output_scanline) * out.width * 3;
    jpeg_read_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_decompress(&cinfo);
  jpeg_destroy_decompress(&cinfo);
  return out;
}

std::vector<uint8_t> EncodePfm(const HdrImage& image) {
  const std::string header = "PF\n" + std::to_string(image.width) + " " + std::to_string(image.height) + "\n-1.0\n";
  std::vector<uint8_t> out(header.begin(), header.end());
  const std::size_t row = static_cast<std::size_t>(image.width) * 3;
  out.reserve(out.size() + image.rgb.size() * 4);
  for (int y = image.height - 1; y >= 0; --y) {
    for (std::size_t i = 0; i < row; ++i) {
      uint32_t bits;
      std::memcpy(&bits, &image.rgb[y * row + i], 4);
      for (int b = 0; b < 4; ++b) out.push_back(static_cast<uint8_t>(bits >> (8 * b)));
    }
  }
  return out;
}

HdrImage DecodePfm(const std::vector<uint8_t>& bytes) {
  std::size_t pos = 0;
  auto token = [&]() {
    while (pos < bytes.size() && std::isspace(bytes[pos])) ++pos;
    std::string t;
    while (pos < bytes.size() && !std::isspace(bytes[pos])) t.push_back(static_cast<char>(bytes[pos++]));
    return t;
  };
  if (token() != "PF") Fail(ErrorCode::kParse, "not a color pfm file");
  int w = 0, h = 0;
  double scale = 0.0;
  try {
    w = std::stoi(token());
    h = std::stoi(token());
    scale = std::stod(token());
  } catch (const std::exception&) {
    Fail(ErrorCode::kParse, "malformed pfm header");
  }
  ++pos;  // single whitespace after the scale
  if (w <= 0 || h <= 0) Fail(ErrorCode::kParse, "bad pfm size");
  const bool little = scale < 0.0;
  HdrImage img(w, h);
  const std::size_t row = static_cast<std::size_t>(w) * 3;
  if (bytes.size() < pos + row * h * 4) Fail(ErrorCode::kParse, "truncated pfm data");
  for (int y = h - 1; y >= 0; --y) {
    for (std::size_t i = 0; i < row; ++i) {
      uint32_t bits = 0;
      for (int b = 0; b < 4; ++b) {
        const uint32_t byte = bytes[pos + (little ? b : 3 - b)];
        bits |= byte << (8 * b);
      }
      pos += 4;
      std::memcpy(&img.rgb[y * row + i], &bits, 4);
    }
  }
  return img;
}

void WritePng(const std::string& path, const LdrImage& image) { WriteFileAtomic(path, EncodePng(image)); }

void WritePfm(const std::string& path, const HdrImage& image) { WriteFileAtomic(path, EncodePfm(image)); }

LdrImage ReadImage(const std::string& path) {
  const std::vector<uint8_t> bytes = ReadFileBinary(path);
  LdrImage img;
  try {
    if (bytes.size() >= 8 && png_sig_cmp(bytes.data(), 0, 8) == 0) {
      img = DecodePng(bytes);
    } else if (bytes.size() >= 3 && bytes[0] == 0xFF && bytes[1] == 0xD8 && bytes[2] == 0xFF) {
      img = DecodeJpeg(bytes);
    } else {
      Fail(ErrorCode::kParse, "unsupported image format");
    }
  } catch (const Error& e) {
    Fail(e.code(), path + ": " + e.what());
  }
  if (img.channels == 3) return img;
  LdrImage rgb(img.width, img.height, 3);
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      for (int c = 0; c < 3; ++c) rgb.at(x, y, c) = img.at(x, y, img.channels == 1 ? 0 : std::min(c, img.channels - 1));
    }
  }
  return rgb;
}

LdrImage ResizeBilinear(const LdrImage& image, int width, int height) {
  if (image.width == width && image.height == height) return image;
  if (width <= 0 || height <= 0 || image.width <= 0 || image.height <= 0) {
    Fail(ErrorCode::kInvalidArgument, "resize needs positive sizes");
  }
  LdrImage out(width, height, image.channels);
  const double sx = static_cast<double>(image.width) / width;
  const double sy = static_cast<double>(image.height) / height;
  for (int y = 0; y < height; ++y) {
    const double fy = std::clamp((y + 0.5) * sy - 0.5, 0.0, image.height - 1.0);
    const int y0 = static_cast<int>(fy);
    const int y1 = std::min(y0 + 1, image.height - 1);
    const double ty = fy - y0;
    for (int x = 0; x < width; ++x) {
      const double fx = std::clamp((x + 0.5) * sx - 0.5, 0.0, image.width - 1.0);
      const int x0 = static_cast<int>(fx);
      const int x1 = std::min(x0 + 1, image.width - 1);
      const double tx = fx - x0;
      for (int c = 0; c < image.channels; ++c) {
        const double top = image.at(x0, y0, c) * (1 - tx) + image.at(x1, y0, c) * tx;
        const double bottom = image.at(x0, y1, c) * (1 - tx) + image.at(x1, y1, c) * tx;
        out.at(x, y, c) = static_cast<uint8_t>(std::clamp(std::floor(top * (1 - ty) + bottom * ty + 0.5), 0.0, 255.0));
      }
    }
  }
  return out;
}

}  // namespace pbrsynth::render
