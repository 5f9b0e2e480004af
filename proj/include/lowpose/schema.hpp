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

#include <string>
#include <utility>
#include <vector>

namespace lowpose {

/// Keypoint naming, horizontal-flip pairing and per-keypoint OKS constants.
/// OKS constants are stored as the COCO "k_i" values (twice the per-keypoint
/// standard deviations printed by the CrowdPose toolkit), so that
/// exp(-d^2 / (2 * area * k_i^2)) reproduces the toolkit's similarity.
struct KeypointSchema {
  std::vector<std::string> names;
  std::vector<std::pair<int, int>> flip_pairs;
  std::vector<double> oks_sigmas;

  int size() const noexcept { return static_cast<int>(names.size()); }

  /// Index permutation applied to keypoints under a horizontal flip.
  std::vector<int> flip_permutation() const;

  void validate() const;

  bool operator==(const KeypointSchema&) const = default;
};

/// The 14-keypoint CrowdPose layout.
KeypointSchema crowdpose_schema();

/// A schema of `k` anonymous keypoints with no flip pairs, used when a
/// pipeline runs with a non-default keypoint count and no schema file.
KeypointSchema generic_schema(int k);

}  // namespace lowpose
