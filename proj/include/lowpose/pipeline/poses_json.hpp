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
#include "lowpose/pipeline/annotations.hpp"

namespace lowpose {

struct ImagePoses {
  std::int64_t image_id = 0;
  std::string file_name;  // optional; empty when unknown
  std::vector<Pose> poses;

  bool operator==(const ImagePoses&) const = default;
};

/// In-memory form of poses.json; see docs/poses_json.md.
struct PoseFile {
  int keypoint_count = kDefaultKeypointCount;
  std::vector<ImagePoses> images;

  const ImagePoses* find(std::int64_t image_id) const;

  bool operator==(const PoseFile&) const = default;
};

std::string_view to_string(PoseSource source);
PoseSource pose_source_from_string(std::string_view name);

/// `expected_k` of 0 accepts the file's own keypoint_count.
PoseFile parse_poses(std::string_view json_text, int expected_k = 0);
PoseFile load_poses(const std::filesystem::path& path, int expected_k = 0);

std::string dump_poses(const PoseFile& file);
void save_poses(const std::filesystem::path& path, const PoseFile& file);

/// COCO keypoint-results array: one entry per pose with 3K-flat
/// [x, y, keypoint score].
std::string dump_coco_results(const PoseFile& file);

/// Predictions re-indexed to follow `gt.images`. Images absent from `preds`
/// get no predictions; a prediction for an image the ground truth lacks is
/// kImageIdMismatch.
std::vector<std::vector<Pose>> align_to_annotations(const PoseFile& preds, const AnnotationSet& gt);

}  // namespace lowpose
