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

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <string>

#include <json.hpp>

#include "lowpose/error.hpp"

namespace lowpose::detail {

using Json = nlohmann::json;

/// A double whose shortest decimal form is the float's shortest form, so a
/// dumped float reads back as the same float without a 17-digit tail.
inline double json_float(float f) {
  char buf[32];
  auto r = std::to_chars(buf, buf + sizeof(buf), f);
  *r.ptr = '\0';
  return std::strtod(buf, nullptr);
}

inline const Json& member(const Json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) throw Error(ErrorCode::kSchemaError, where + ": missing field '" + key + "'");
  return *it;
}

inline double as_number(const Json& j, const std::string& where) {
  if (!j.is_number()) throw Error(ErrorCode::kSchemaError, where + ": expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw Error(ErrorCode::kSchemaError, where + ": number is not finite");
  return v;
}

inline std::int64_t as_integer(const Json& j, const std::string& where) {
  if (j.is_number_integer()) return j.get<std::int64_t>();
  if (j.is_number_float()) {
    const double v = j.get<double>();
    if (std::isfinite(v) && v == std::floor(v) && std::abs(v) < 9.0e15) {
      return static_cast<std::int64_t>(v);
    }
  }
  throw Error(ErrorCode::kSchemaError, where + ": expected an integer");
}

inline int as_int(const Json& j, const std::string& where) {
  const auto v = as_integer(j, where);
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) {
    throw Error(ErrorCode::kSchemaError, where + ": integer out of range");
  }
  return static_cast<int>(v);
}

inline const std::string& as_string(const Json& j, const std::string& where) {
  if (!j.is_string()) throw Error(ErrorCode::kSchemaError, where + ": expected a string");
  return j.get_ref<const std::string&>();
}

inline const Json& as_array(const Json& j, const std::string& where) {
  if (!j.is_array()) throw Error(ErrorCode::kSchemaError, where + ": expected an array");
  return j;
}

inline const Json& as_object(const Json& j, const std::string& where) {
  if (!j.is_object()) throw Error(ErrorCode::kSchemaError, where + ": expected an object");
  return j;
}

/// Malformed text raises kParseError.
inline Json parse_json(std::string_view text) {
  Json j = Json::parse(text.begin(), text.end(), nullptr, false);
  if (j.is_discarded()) throw Error(ErrorCode::kParseError, "malformed JSON");
  return j;
}

}  // namespace lowpose::detail
