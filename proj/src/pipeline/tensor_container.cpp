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

#include "lowpose/pipeline/tensor_container.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <limits>
#include <set>

#include "lowpose/pipeline/file_util.hpp"

namespace lowpose {

namespace {

constexpr std::uint8_t kMagic[4] = {'L', 'P', 'T', 'C'};
constexpr std::uint16_t kVersion = 1;

class Writer {
 public:
  void bytes(const void* p, std::size_t n) {
    const auto* b = static_cast<const std::uint8_t*>(p);
    out_.insert(out_.end(), b, b + n);
  }
  template <class U>
  void le(U v) {
    for (std::size_t i = 0; i < sizeof(U); ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  std::vector<std::uint8_t> take() { return std::move(out_); }

 private:
  std::vector<std::uint8_t> out_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> in) : in_(in) {}

  std::size_t remaining() const { return in_.size() - pos_; }

  std::span<const std::uint8_t> take(std::size_t n, const char* what) {
    if (n > remaining()) {
      throw Error(ErrorCode::kTruncatedFile, std::string("file ends inside ") + what);
    }
    auto s = in_.subspan(pos_, n);
    pos_ += n;
    return s;
  }
  template <class U>
  U le(const char* what) {
    auto s = take(sizeof(U), what);
    U v = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i) v |= static_cast<U>(static_cast<U>(s[i]) << (8 * i));
    return v;
  }

 private:
  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

bool valid_utf8(std::string_view s) {
  std::size_t i = 0;
  while (i < s.size()) {
    const auto c = static_cast<unsigned char>(s[i]);
    int extra = 0;
    std::uint32_t cp = 0;
    if (c < 0x80) {
      ++i;
      continue;
    } else if ((c & 0xE0) == 0xC0) {
      extra = 1;
      cp = c & 0x1F;
    } else if ((c & 0xF0) == 0xE0) {
      extra = 2;
      cp = c & 0x0F;
    } else if ((c & 0xF8) == 0xF0) {
      extra = 3;
      cp = c & 0x07;
    } else {
      return false;
    }
    if (i + extra >= s.size()) return false;
    for (int k = 1; k <= extra; ++k) {
      const auto cc = static_cast<unsigned char>(s[i + k]);
      if ((cc & 0xC0) != 0x80) return false;
      cp = (cp << 6) | (cc & 0x3F);
    }
    static constexpr std::uint32_t kMin[] = {0, 0x80, 0x800, 0x10000};
    if (cp < kMin[extra] || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) return false;
    i += extra + 1;
  }
  return true;
}

/// Element count of `shape`; UINT64_MAX on overflow.
std::uint64_t checked_count(const std::vector<std::uint32_t>& shape) {
  std::uint64_t n = 1;
  for (std::uint32_t d : shape) {
    if (d != 0 && n > std::numeric_limits<std::uint64_t>::max() / d) {
      return std::numeric_limits<std::uint64_t>::max();
    }
    n *= d;
  }
  return n;
}

void check_tensor(const NamedTensor& t) {
  if (t.name.size() > std::numeric_limits<std::uint16_t>::max()) {
    throw Error(ErrorCode::kLengthMismatch, "tensor name too long");
  }
  if (!valid_utf8(t.name)) throw Error(ErrorCode::kDecodeError, "tensor name is not UTF-8");
  if (t.shape.size() > std::numeric_limits<std::uint8_t>::max()) {
    throw Error(ErrorCode::kLengthMismatch, "tensor '" + t.name + "' has too many dimensions");
  }
  if (t.dtype != DType::kFloat32 && t.dtype != DType::kUInt8) {
    throw Error(ErrorCode::kUnsupportedFormat, "tensor '" + t.name + "' has an unknown dtype");
  }
  const std::uint64_t n = checked_count(t.shape);
  if (n == std::numeric_limits<std::uint64_t>::max() ||
      n * dtype_size(t.dtype) != t.payload.size()) {
    throw Error(ErrorCode::kLengthMismatch,
                "tensor '" + t.name + "' payload does not match its shape");
  }
}

}  // namespace

std::size_t dtype_size(DType dtype) { return dtype == DType::kFloat32 ? 4 : 1; }

std::uint64_t NamedTensor::element_count() const { return checked_count(shape); }

NamedTensor NamedTensor::from_floats(std::string name, std::vector<std::uint32_t> shape,
                                     std::span<const float> values) {
  NamedTensor t;
  t.name = std::move(name);
  t.dtype = DType::kFloat32;
  t.shape = std::move(shape);
  t.payload.resize(values.size() * 4);
  for (std::size_t i = 0; i < values.size(); ++i) {
    const std::uint32_t bits = std::bit_cast<std::uint32_t>(values[i]);
    for (int b = 0; b < 4; ++b) t.payload[4 * i + b] = static_cast<std::uint8_t>(bits >> (8 * b));
  }
  check_tensor(t);
  return t;
}

NamedTensor NamedTensor::from_tensor(std::string name, const Tensor3f& t) {
  return from_floats(std::move(name),
                     {static_cast<std::uint32_t>(t.channels), static_cast<std::uint32_t>(t.height),
                      static_cast<std::uint32_t>(t.width)},
                     t.data);
}

std::vector<float> NamedTensor::to_floats() const {
  if (dtype == DType::kUInt8) return {payload.begin(), payload.end()};
  std::vector<float> out(payload.size() / 4);
  for (std::size_t i = 0; i < out.size(); ++i) {
    std::uint32_t bits = 0;
    for (int b = 0; b < 4; ++b) bits |= std::uint32_t(payload[4 * i + b]) << (8 * b);
    out[i] = std::bit_cast<float>(bits);
  }
  return out;
}

Tensor3f NamedTensor::to_tensor3() const {
  if (shape.size() != 3) {
    throw Error(ErrorCode::kShapeMismatch, "tensor '" + name + "' must have rank 3");
  }
  for (auto d : shape) {
    if (d > static_cast<std::uint32_t>(std::numeric_limits<int>::max())) {
      throw Error(ErrorCode::kShapeMismatch, "tensor '" + name + "' is too large");
    }
  }
  Tensor3f t;
  t.channels = static_cast<int>(shape[0]);
  t.height = static_cast<int>(shape[1]);
  t.width = static_cast<int>(shape[2]);
  t.data = to_floats();
  return t;
}

std::vector<std::uint8_t> serialize_container(const TensorContainer& tensors) {
  if (tensors.size() > std::numeric_limits<std::uint32_t>::max()) {
    throw Error(ErrorCode::kLengthMismatch, "too many tensors");
  }
  std::set<std::string> names;
  Writer w;
  w.bytes(kMagic, 4);
  w.le<std::uint16_t>(kVersion);
  w.le<std::uint32_t>(static_cast<std::uint32_t>(tensors.size()));
  for (const auto& t : tensors) {
    check_tensor(t);
    if (!names.insert(t.name).second) {
      throw Error(ErrorCode::kSchemaError, "duplicate tensor name '" + t.name + "'");
    }
    w.le<std::uint16_t>(static_cast<std::uint16_t>(t.name.size()));
    w.bytes(t.name.data(), t.name.size());
    w.le<std::uint8_t>(static_cast<std::uint8_t>(t.dtype));
    w.le<std::uint8_t>(static_cast<std::uint8_t>(t.shape.size()));
    for (auto d : t.shape) w.le<std::uint32_t>(d);
    w.bytes(t.payload.data(), t.payload.size());
  }
  return w.take();
}

TensorContainer parse_container(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  const auto magic = r.take(4, "magic");
  if (!std::equal(magic.begin(), magic.end(), kMagic)) {
    throw Error(ErrorCode::kBadMagic, "not a tensor container (bad magic)");
  }
  const auto version = r.le<std::uint16_t>("version");
  if (version != kVersion) {
    throw Error(ErrorCode::kUnsupportedVersion, "unsupported container version " + std::to_string(version));
  }
  const auto count = r.le<std::uint32_t>("tensor count");
  TensorContainer out;
  // Every tensor record needs at least 4 header bytes; bound the reservation
  // by what the file can actually hold.
  out.reserve(std::min<std::size_t>(count, r.remaining() / 4));
  std::set<std::string> names;
  for (std::uint32_t i = 0; i < count; ++i) {
    NamedTensor t;
    const auto name_len = r.le<std::uint16_t>("tensor name length");
    const auto name = r.take(name_len, "tensor name");
    t.name.assign(name.begin(), name.end());
    if (!valid_utf8(t.name)) throw Error(ErrorCode::kDecodeError, "tensor name is not UTF-8");
    if (!names.insert(t.name).second) {
      throw Error(ErrorCode::kSchemaError, "duplicate tensor name '" + t.name + "'");
    }
    const auto code = r.le<std::uint8_t>("dtype");
    if (code > 1) {
      throw Error(ErrorCode::kUnsupportedFormat, "tensor '" + t.name + "' has unknown dtype code " +
                                                     std::to_string(code));
    }
    t.dtype = static_cast<DType>(code);
    const auto ndim = r.le<std::uint8_t>("rank");
    t.shape.resize(ndim);
    for (auto& d : t.shape) d = r.le<std::uint32_t>("shape");
    const std::uint64_t n = checked_count(t.shape);
    const std::uint64_t size = dtype_size(t.dtype);
    if (n == std::numeric_limits<std::uint64_t>::max() || n > r.remaining() / size) {
      throw Error(ErrorCode::kTruncatedFile, "tensor '" + t.name + "' payload exceeds the file");
    }
    const auto payload = r.take(static_cast<std::size_t>(n * size), "payload");
    t.payload.assign(payload.begin(), payload.end());
    out.push_back(std::move(t));
  }
  if (r.remaining() != 0) {
    throw Error(ErrorCode::kLengthMismatch,
                std::to_string(r.remaining()) + " trailing bytes after the last tensor");
  }
  return out;
}

void write_tensor_container(const std::filesystem::path& path, const TensorContainer& tensors) {
  write_file_atomic(path, serialize_container(tensors));
}

TensorContainer read_tensor_container(const std::filesystem::path& path) {
  const auto bytes = read_file_bytes(path);
  try {
    return parse_container(bytes);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.detail());
  }
}

const NamedTensor* try_find_tensor(const TensorContainer& tensors, const std::string& name) {
  for (const auto& t : tensors) {
    if (t.name == name) return &t;
  }
  return nullptr;
}

const NamedTensor& find_tensor(const TensorContainer& tensors, const std::string& name) {
  if (const auto* t = try_find_tensor(tensors, name)) return *t;
  throw Error(ErrorCode::kSchemaError, "container lacks tensor '" + name + "'");
}

}  // namespace lowpose
