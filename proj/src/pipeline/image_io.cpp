// Copyright 2026 The LowPose Authors
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

#include "lowpose/pipeline/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstring>
#include <string>

#include "lowpose/pipeline/file_util.hpp"

namespace lowpose {

namespace {

constexpr std::uint8_t kPngSignature[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1A, '\n'};
// Guards the size arithmetic; far above any image this toolkit handles.
constexpr int kMaxExtent = 1 << 15;

Image decode_png(std::span<const std::uint8_t> bytes) {
  png_image png;
  std::memset(&png, 0, sizeof(png));
  png.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&png, bytes.data(), bytes.size())) {
    throw Error(ErrorCode::kDecodeError, std::string("PNG: ") + png.message);
  }
  if (png.width < 1 || png.height < 1 || png.width > kMaxExtent || png.height > kMaxExtent) {
    png_image_free(&png);
    throw Error(ErrorCode::kDecodeError, "PNG: unsupported dimensions");
  }
  const bool color = (png.format & PNG_FORMAT_FLAG_COLOR) != 0;
  png.format = color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  const int channels = color ? 3 : 1;
  std::vector<std::uint8_t> buf(PNG_IMAGE_SIZE(png));
  if (!png_image_finish_read(&png, nullptr, buf.data(), 0, nullptr)) {
    const std::string msg = png.message;
    png_image_free(&png);
    throw Error(ErrorCode::kDecodeError, "PNG: " + msg);
  }
  return Image(static_cast<int>(png.width), static_cast<int>(png.height), channels,
               std::vector<float>(buf.begin(), buf.end()));
}

std::vector<std::uint8_t> encode_png(const Image& img) {
  png_image png;
  std::memset(&png, 0, sizeof(png));
  png.version = PNG_IMAGE_VERSION;
  png.width = static_cast<png_uint_32>(img.width());
  png.height = static_cast<png_uint_32>(img.height());
  png.format = img.channels() == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  std::vector<std::uint8_t> pixels(img.size());
  std::transform(img.data().begin(), img.data().end(), pixels.begin(), quantize);
  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&png, nullptr, &size, 0, pixels.data(), 0, nullptr)) {
    throw Error(ErrorCode::kIoError, std::string("PNG: ") + png.message);
  }
  std::vector<std::uint8_t> out(size);
  if (!png_image_write_to_memory(&png, out.data(), &size, 0, pixels.data(), 0, nullptr)) {
    throw Error(ErrorCode::kIoError, std::string("PNG: ") + png.message);
  }
  out.resize(size);
  return out;
}

class PnmHeader {
 public:
  explicit PnmHeader(std::span<const std::uint8_t> in) : in_(in), pos_(2) {}

  int next_int(long limit) {
    skip_space_and_comments();
    if (pos_ >= in_.size() || !std::isdigit(in_[pos_])) {
      throw Error(ErrorCode::kDecodeError, "PPM: malformed header");
    }
    long v = 0;
    while (pos_ < in_.size() && std::isdigit(in_[pos_])) {
      v = v * 10 + (in_[pos_++] - '0');
      if (v > limit) throw Error(ErrorCode::kDecodeError, "PPM: header value too large");
    }
    return static_cast<int>(v);
  }

  /// Consumes the single whitespace byte that ends the header.
  std::size_t data_start() {
    if (pos_ >= in_.size() || !std::isspace(in_[pos_])) {
      throw Error(ErrorCode::kDecodeError, "PPM: malformed header");
    }
    return pos_ + 1;
  }

 private:
  void skip_space_and_comments() {
    while (pos_ < in_.size()) {
      if (std::isspace(in_[pos_])) {
        ++pos_;
      } else if (in_[pos_] == '#') {
        while (pos_ < in_.size() && in_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  std::span<const std::uint8_t> in_;
  std::size_t pos_;
};

Image decode_pnm(std::span<const std::uint8_t> bytes) {
  const int channels = bytes[1] == '6' ? 3 : 1;
  PnmHeader header(bytes);
  const int w = header.next_int(kMaxExtent);
  const int h = header.next_int(kMaxExtent);
  // Legal PNM maxvals reach 65535; only the 8-bit range is decoded.
  const int maxval = header.next_int(65535);
  const std::size_t start = header.data_start();
  if (w < 1 || h < 1) throw Error(ErrorCode::kDecodeError, "PPM: empty image");
  if (maxval < 1 || maxval > 255) {
    throw Error(ErrorCode::kUnsupportedFormat, "PPM: only 8-bit maxval is supported");
  }
  const std::size_t n = static_cast<std::size_t>(w) * h * channels;
  if (bytes.size() - start != n) {
    throw Error(ErrorCode::kDecodeError, "PPM: expected " + std::to_string(n) +
                                             " pixel bytes, found " +
                                             std::to_string(bytes.size() - start));
  }
  std::vector<float> data(n);
  for (std::size_t i = 0; i < n; ++i) {
    const float v = bytes[start + i];
    data[i] = maxval == 255 ? v : std::min(255.0f, std::floor(v * 255.0f / maxval + 0.5f));
  }
  return Image(w, h, channels, std::move(data));
}

std::vector<std::uint8_t> encode_pnm(const Image& img) {
  const std::string header = std::string(img.channels() == 3 ? "P6" : "P5") + "\n" +
                             std::to_string(img.width()) + " " + std::to_string(img.height()) +
                             "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.reserve(out.size() + img.size());
  for (float v : img.data()) out.push_back(quantize(v));
  return out;
}

}  // namespace

std::uint8_t quantize(float v) {
  if (!(v > 0.0f)) return 0;
  if (v >= 255.0f) return 255;
  return static_cast<std::uint8_t>(std::floor(v + 0.5f));
}

Image decode_image(std::span<const std::uint8_t> bytes) {
  if (bytes.size() >= 8 && std::equal(kPngSignature, kPngSignature + 8, bytes.begin())) {
    return decode_png(bytes);
  }
  if (bytes.size() >= 2 && bytes[0] == 'P' && (bytes[1] == '6' || bytes[1] == '5')) {
    return decode_pnm(bytes);
  }
  throw Error(ErrorCode::kUnsupportedFormat, "not a PNG, P6 or P5 image");
}

std::vector<std::uint8_t> encode_image(const Image& img, ImageFormat format) {
  if (img.empty() || (img.channels() != 1 && img.channels() != 3)) {
    throw Error(ErrorCode::kInvalidParam, "only 1- or 3-channel images can be written");
  }
  return format == ImageFormat::kPng ? encode_png(img) : encode_pnm(img);
}

ImageFormat format_for_path(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  if (ext == ".png") return ImageFormat::kPng;
  if (ext == ".ppm" || ext == ".pgm") return ImageFormat::kPpm;
  throw Error(ErrorCode::kUnsupportedFormat, path.string() + ": unknown image extension");
}

bool is_image_path(const std::filesystem::path& path) {
  try {
    format_for_path(path);
    return true;
  } catch (const Error&) {
    return false;
  }
}

Image read_image(const std::filesystem::path& path) {
  const auto bytes = read_file_bytes(path);
  try {
    return decode_image(bytes);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.detail());
  }
}

void write_image(const std::filesystem::path& path, const Image& img) {
  write_file_atomic(path, encode_image(img, format_for_path(path)));
}

}  // namespace lowpose
