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

#include <span>
#include <vector>

#include "lowpose/core.hpp"

namespace lowpose {

struct FusionConfig {
  double s_m = 0.9;
  double s_c = 0.5;
  double nms_oks_threshold = 0.5;
  std::vector<double> kpt_sigmas;

  void validate(int keypoint_count) const;
  bool operator==(const FusionConfig&) const = default;
};

/// Poses with score strictly above `threshold`, order preserved.
std::vector<Pose> select_confident(const std::vector<Pose>& poses, double threshold);

/// Object keypoint similarity of `candidate` against `reference`, averaged
/// over the keypoints labeled in the reference.
double pose_oks(const Pose& candidate, const Pose& reference, double area,
                std::span<const double> sigmas);

/// Area used when a pose itself is the OKS reference: its keypoint-hull box,
/// at least 1 px^2.
double pose_reference_area(const Pose& pose);

/// Greedy OKS suppression. Ranking is score descending, then kMain before
/// kComplementary, then input order. A kept pose removes every remaining
/// pose whose OKS against it exceeds nms_oks_threshold.
std::vector<Pose> pose_nms(const std::vector<Pose>& poses, const FusionConfig& cfg);

/// NMS(main[score > s_m] ++ comp[score > s_c]).
std::vector<Pose> fuse_dual(const std::vector<Pose>& main_poses, const std::vector<Pose>& comp_poses,
                            const FusionConfig& cfg);

struct PseudoLabelRow {
  double oks_threshold = 0.0;
  int n_main_valid = 0;
  int n_comp_valid = 0;
  int n_additional = 0;
  /// 100 * n_additional / n_main_valid (0 when no main label is valid).
  double pct_additional = 0.0;
};

/// Per-image pseudo labels and ground truth, aligned by index.
struct PseudoLabelInputs {
  std::vector<std::vector<Pose>> main;
  std::vector<std::vector<Pose>> comp;
  std::vector<std::vector<PersonAnnotation>> gt;
};

/// Counts valid pseudo labels per teacher and the valid complementary labels
/// that overlap no valid main label. A label is valid when greedy one-to-one
/// matching (highest OKS first, ground-truth area) pairs it with a ground
/// truth at OKS >= threshold. Overlap between teachers is judged with the
/// complementary label's matched ground-truth area.
std::vector<PseudoLabelRow> pseudo_label_stats(const PseudoLabelInputs& inputs,
                                               const std::vector<double>& oks_thresholds,
                                               double overlap_threshold,
                                               std::span<const double> sigmas);

/// Mean of the labeled keypoints.
Point2 center_of(const Pose& pose);

}  // namespace lowpose
