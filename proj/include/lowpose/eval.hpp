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
#include <utility>
#include <vector>

#include "lowpose/core.hpp"

namespace lowpose {

/// OKS thresholds 0.50, 0.55, ..., 0.95.
std::vector<double> coco_oks_thresholds();

struct EvalReport {
  std::vector<std::pair<double, double>> ap_per_threshold;  // (threshold, AP)
  double ap_mean = 0.0;
  int n_gt = 0;
  int n_pred = 0;
};

/// Average precision over the per-image predictions and ground truth
/// (aligned by index) at a single OKS threshold, with COCO's 101-point
/// interpolated precision. Ground truths with no labeled keypoint are ignored.
double average_precision(const std::vector<std::vector<Pose>>& preds,
                         const std::vector<std::vector<PersonAnnotation>>& gts, double threshold,
                         std::span<const double> sigmas);

EvalReport evaluate_ap(const std::vector<std::vector<Pose>>& preds,
                       const std::vector<std::vector<PersonAnnotation>>& gts,
                       std::span<const double> sigmas);

struct Histogram {
  std::vector<double> edges;
  std::vector<int> counts;
};

struct CenterErrorReport {
  double match_radius = 20.0;
  int n_matched = 0;
  int n_gt = 0;
  double mean_error = 0.0;
  /// Population variance of the recorded errors.
  double variance = 0.0;
  Histogram histogram;
  std::vector<double> errors;
};

struct CenterErrorOptions {
  double radius = 20.0;
  double bin_width = 1.0;
  /// Greedy nearest-first matching where each prediction serves one ground
  /// truth. Off: every ground truth takes its nearest prediction.
  bool one_to_one = false;

  bool operator==(const CenterErrorOptions&) const = default;
};

/// Distance from each ground-truth center (mean of labeled keypoints) to the
/// nearest predicted Pose::center of the same image, recorded when strictly
/// below the radius.
CenterErrorReport center_error_analysis(const std::vector<std::vector<Pose>>& preds,
                                        const std::vector<std::vector<PersonAnnotation>>& gts,
                                        const CenterErrorOptions& options = {});

}  // namespace lowpose
