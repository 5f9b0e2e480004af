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
#include <string>
#include <string_view>
#include <vector>

#include "lowpose/core.hpp"

namespace lowpose {

struct ImageInfo {
  std::int64_t id = 0;
  std::string file_name;
  int width = 0;
  int height = 0;

  bool operator==(const ImageInfo&) const = default;
};

/// CrowdPose-style annotation file: `images`, `annotations` with 3K-flat
/// [x, y, v] keypoints, and `categories` carrying the keypoint names.
struct AnnotationSet {
  std::vector<ImageInfo> images;
  std::vector<PersonAnnotation> annotations;
  std::vector<std::string> keypoint_names;

  int keypoint_count() const noexcept { return static_cast<int>(keypoint_names.size()); }

  /// Annotations grouped per image, in `images` order.
  std::vector<std::vector<PersonAnnotation>> per_image() const;

  /// Index into `images`, or -1.
  int find_image(std::int64_t id) const;

  bool operator==(const AnnotationSet&) const = default;
};

/// `expected_k` of 0 accepts whatever keypoint count the categories declare.
AnnotationSet parse_annotations(std::string_view json_text, int expected_k = 0);
AnnotationSet load_annotations(const std::filesystem::path& path, int expected_k = 0);

std::string dump_annotations(const AnnotationSet& set);
void save_annotations(const std::filesystem::path& path, const AnnotationSet& set);

}  // namespace lowpose
