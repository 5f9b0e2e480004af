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
#include <string>
#include <vector>

#include "lowpose/core.hpp"

namespace lowpose {

enum class DType : std::uint8_t { kFloat32 = 0, kUInt8 = 1 };

std::size_t dtype_size(DType dtype);

/// One named tensor; `payload` holds the little-endian bytes exactly as
/// stored on disk.
struct NamedTensor {
  std::string name;
  DType dtype = DType::kFloat32;
  std::vector<std::uint32_t> shape;
  std::vector<std::uint8_t> payload;

  std::uint64_t element_count() const;

  static NamedTensor from_floats(std::string name, std::vector<std::uint32_t> shape,
                                 std::span<const float> values);
  static NamedTensor from_tensor(std::string name, const Tensor3f& t);

  std::vector<float> to_floats() const;
  /// Requires a float32 tensor of rank 3.
  Tensor3f to_tensor3() const;

  bool operator==(const NamedTensor&) const = default;
};

using TensorContainer = std::vector<NamedTensor>;

/// Layout: "LPTC", u16 version (1), u32 count, then per tensor u16 name
/// length, name bytes, u8 dtype, u8 ndim, ndim x u32 dims, payload. All
/// integers little-endian.
std::vector<std::uint8_t> serialize_container(const TensorContainer& tensors);
TensorContainer parse_container(std::span<const std::uint8_t> bytes);

void write_tensor_container(const std::filesystem::path& path, const TensorContainer& tensors);
TensorContainer read_tensor_container(const std::filesystem::path& path);

/// Throws kSchemaError naming the missing tensor.
const NamedTensor& find_tensor(const TensorContainer& tensors, const std::string& name);
const NamedTensor* try_find_tensor(const TensorContainer& tensors, const std::string& name);

}  // namespace lowpose
