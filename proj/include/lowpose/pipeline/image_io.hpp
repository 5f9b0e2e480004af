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

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "lowpose/core.hpp"

namespace lowpose {

enum class ImageFormat { kPng, kPpm };

/// Round half up, clamped to [0, 255]; NaN maps to 0.
std::uint8_t quantize(float v);

/// Sniffs PNG, binary PPM (P6) or binary PGM (P5). Anything else is
/// kUnsupportedFormat; damaged data is kDecodeError.
Image decode_image(std::span<const std::uint8_t> bytes);

/// PPM output is P6 for 3 channels and P5 for 1.
std::vector<std::uint8_t> encode_image(const Image& img, ImageFormat format);

/// The format follows the extension: .png, or .ppm / .pgm.
ImageFormat format_for_path(const std::filesystem::path& path);
bool is_image_path(const std::filesystem::path& path);

Image read_image(const std::filesystem::path& path);
void write_image(const std::filesystem::path& path, const Image& img);

}  // namespace lowpose
