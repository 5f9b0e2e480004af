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

#include <vector>

#include "lowpose/core.hpp"

namespace lowpose {

struct CodecConfig {
  int keypoint_count = kDefaultKeypointCount;
  double heatmap_sigma = 2.0;
  int output_stride = 4;
  double peak_threshold = 0.01;
  int local_max_window = 3;
  int max_people = 30;
  double tag_group_threshold = 1.0;
  /// Radius of the disk around each center whose pixels carry offset targets.
  double offset_radius = 2.0;

  void validate() const;
  bool operator==(const CodecConfig&) const = default;
};

/// Weight on the activation term of the grouping cost; only breaks ties
/// between equally distant tags.
inline constexpr double kGroupingActivationEpsilon = 1e-3;

/// Map size for an image of the given size under cfg.output_stride.
int map_extent(int image_extent, const CodecConfig& cfg);

/// Scales annotation coordinates (keypoints, bbox, area) into map space.
std::vector<PersonAnnotation> to_map_space(const std::vector<PersonAnnotation>& anns,
                                           const CodecConfig& cfg);

/// Gaussian heatmaps for every labeled in-bounds keypoint and person center
/// (max-composed), offsets p_k - q at every pixel q of each center disk, and
/// offset weights 1 / bbox diagonal on the labeled channels of that disk.
/// Annotations must already be in map coordinates. A disk pixel shared by
/// two people belongs to the nearer center.
TargetMaps encode_targets(const std::vector<PersonAnnotation>& anns, const CodecConfig& cfg,
                          int map_w, int map_h);

/// The per-person supervision sets that encode_targets writes weights for.
std::vector<OffsetSupervision> encode_offset_supervision(const std::vector<PersonAnnotation>& anns,
                                                         const CodecConfig& cfg, int map_w,
                                                         int map_h);

/// Per person, the tag-map lookup position of each labeled in-bounds keypoint
/// (rounded to the nearest pixel).
std::vector<std::vector<TagIndex>> encode_tag_targets(const std::vector<PersonAnnotation>& anns,
                                                      const CodecConfig& cfg, int map_w, int map_h);

struct Peak {
  int x = 0;
  int y = 0;
  float activation = 0.0f;
};

/// Local maxima of one plane at or above `threshold`, strongest first.
/// A pixel is a maximum when it beats every neighbour in the window, where a
/// tie counts as a win only against neighbours later in row-major order.
std::vector<Peak> find_peaks(const Tensor3f& maps, int channel, double threshold, int window);

/// Center-based decoding: each center peak q yields keypoints q + offset(q).
/// Results are sorted by score descending and carry source kMain.
std::vector<Pose> decode_center_poses(const Tensor3f& heatmaps, const Tensor3f& offsets,
                                      const CodecConfig& cfg);

struct KeypointCandidate {
  int x = 0;
  int y = 0;
  float activation = 0.0f;
  float tag = 0.0f;
};

using CandidateLists = std::vector<std::vector<KeypointCandidate>>;

CandidateLists extract_keypoint_peaks(const Tensor3f& heatmaps, const TagMap& tags,
                                      const CodecConfig& cfg);

/// Associative-embedding grouping. Keypoint types are visited in index order;
/// each type's candidates are matched to the existing clusters by Hungarian
/// assignment on |tag - cluster mean tag| (minus a tiny activation bonus).
/// Matches farther than tag_group_threshold start new clusters.
std::vector<Pose> group_keypoints(const CandidateLists& candidates, const CodecConfig& cfg);

}  // namespace lowpose
