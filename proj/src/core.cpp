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

#include "lowpose/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace lowpose {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidParam: return "InvalidParam";
    case ErrorCode::kNoVisibleKeypoints: return "NoVisibleKeypoints";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kNonFiniteCost: return "NonFiniteCost";
    case ErrorCode::kZeroDiagonal: return "ZeroDiagonal";
    case ErrorCode::kEmptyPersons: return "EmptyPersons";
    case ErrorCode::kNoLabeledKeypoints: return "NoLabeledKeypoints";
    case ErrorCode::kNonPositiveArea: return "NonPositiveArea";
    case ErrorCode::kMissingScores: return "MissingScores";
    case ErrorCode::kImageIdMismatch: return "ImageIdMismatch";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kSchemaError: return "SchemaError";
    case ErrorCode::kDanglingReference: return "DanglingReference";
    case ErrorCode::kBadMagic: return "BadMagic";
    case ErrorCode::kUnsupportedVersion: return "UnsupportedVersion";
    case ErrorCode::kTruncatedFile: return "TruncatedFile";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kUnsupportedFormat: return "UnsupportedFormat";
    case ErrorCode::kDecodeError: return "DecodeError";
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kConfigError: return "ConfigError";
  }
  return "Unknown";
}

namespace {

void check_dims(int width, int height, int channels) {
  if (width < 1 || height < 1) {
    throw Error(ErrorCode::kInvalidParam, "image dimensions must be >= 1, got " +
                                              std::to_string(width) + "x" + std::to_string(height));
  }
  if (channels != 1 && channels != 3) {
    throw Error(ErrorCode::kInvalidParam,
                "image must have 1 or 3 channels, got " + std::to_string(channels));
  }
}

}  // namespace

Image::Image(int width, int height, int channels, float fill)
    : width_(width), height_(height), channels_(channels) {
  check_dims(width, height, channels);
  data_.assign(static_cast<std::size_t>(width) * height * channels, fill);
  validate();
}

Image::Image(int width, int height, int channels, std::vector<float> data)
    : width_(width), height_(height), channels_(channels), data_(std::move(data)) {
  check_dims(width, height, channels);
  validate();
}

void Image::validate() const {
  check_dims(width_, height_, channels_);
  if (data_.size() != static_cast<std::size_t>(width_) * height_ * channels_) {
    throw Error(ErrorCode::kInvalidParam, "image data length does not match dimensions");
  }
  for (float v : data_) {
    if (!(v >= 0.0f && v <= 255.0f)) {
      throw Error(ErrorCode::kInvalidParam, "image value outside [0, 255]: " + std::to_string(v));
    }
  }
}

void Image::clamp() {
  for (float& v : data_) {
    // NaN maps to 0 so the range invariant survives degenerate arithmetic.
    v = std::isnan(v) ? 0.0f : std::clamp(v, 0.0f, 255.0f);
  }
}

double BoundingBox::diagonal() const noexcept { return std::sqrt(w * w + h * h); }

Point2 labeled_centroid(std::span<const Keypoint> keypoints) {
  double sx = 0.0;
  double sy = 0.0;
  int n = 0;
  for (const auto& kp : keypoints) {
    if (!kp.labeled()) continue;
    sx += kp.x;
    sy += kp.y;
    ++n;
  }
  if (n == 0) throw Error(ErrorCode::kNoLabeledKeypoints, "no labeled keypoints");
  return {sx / n, sy / n};
}

Pose Pose::from_keypoints(std::vector<Keypoint> keypoints, float score, PoseSource source) {
  Pose pose;
  pose.keypoints = std::move(keypoints);
  pose.score = score;
  pose.source = source;
  pose.recompute_center();
  return pose;
}

int Pose::labeled_count() const noexcept {
  return static_cast<int>(std::count_if(keypoints.begin(), keypoints.end(),
                                        [](const Keypoint& k) { return k.labeled(); }));
}

void Pose::recompute_center() {
  if (labeled_count() > 0) center = labeled_centroid(keypoints);
}

void Pose::validate(int keypoint_count) const {
  if (static_cast<int>(keypoints.size()) != keypoint_count) {
    throw Error(ErrorCode::kSchemaError, "pose has " + std::to_string(keypoints.size()) +
                                             " keypoints, expected " +
                                             std::to_string(keypoint_count));
  }
  if (!(score >= 0.0f && score <= 1.0f)) {
    throw Error(ErrorCode::kSchemaError, "pose score outside [0, 1]");
  }
  for (const auto& kp : keypoints) {
    if (kp.v < 0 || kp.v > 2) throw Error(ErrorCode::kSchemaError, "visibility must be 0, 1 or 2");
    if (!(kp.score >= 0.0f && kp.score <= 1.0f)) {
      throw Error(ErrorCode::kSchemaError, "keypoint score outside [0, 1]");
    }
    if (!std::isfinite(kp.x) || !std::isfinite(kp.y)) {
      throw Error(ErrorCode::kSchemaError, "keypoint coordinates must be finite");
    }
  }
}

int PersonAnnotation::labeled_count() const noexcept {
  return static_cast<int>(std::count_if(keypoints.begin(), keypoints.end(),
                                        [](const Keypoint& k) { return k.labeled(); }));
}

void PersonAnnotation::validate(int keypoint_count) const {
  const std::string who = "annotation " + std::to_string(id);
  if (static_cast<int>(keypoints.size()) != keypoint_count) {
    throw Error(ErrorCode::kSchemaError, who + " has " + std::to_string(keypoints.size()) +
                                             " keypoints, expected " +
                                             std::to_string(keypoint_count));
  }
  for (const auto& kp : keypoints) {
    if (kp.v < 0 || kp.v > 2) {
      throw Error(ErrorCode::kSchemaError, who + ": visibility must be 0, 1 or 2");
    }
    if (!std::isfinite(kp.x) || !std::isfinite(kp.y)) {
      throw Error(ErrorCode::kSchemaError, who + ": keypoint coordinates must be finite");
    }
  }
  if (!(bbox.w >= 0.0 && bbox.h >= 0.0) || !std::isfinite(bbox.x) || !std::isfinite(bbox.y)) {
    throw Error(ErrorCode::kSchemaError, who + ": bbox must have finite, non-negative extents");
  }
  if (labeled_count() > 0 && !(area > 0.0 && std::isfinite(area))) {
    throw Error(ErrorCode::kSchemaError, who + ": area must be > 0 for labeled annotations");
  }
}

Pose PersonAnnotation::to_pose() const {
  return Pose::from_keypoints(keypoints, 1.0f, PoseSource::kGroundTruth);
}

void TargetMaps::validate() const {
  const int k = keypoint_count();
  if (k < 1 || !heatmaps.same_shape(heatmap_weight) || offsets.channels != 2 * k ||
      !offsets.same_shape(offset_weight) || offsets.height != heatmaps.height ||
      offsets.width != heatmaps.width) {
    throw Error(ErrorCode::kShapeMismatch, "target maps have inconsistent shapes");
  }
}

BoundingBox pose_bbox(const Pose& pose, double margin) {
  if (!(margin >= 0.0) || !std::isfinite(margin)) {
    throw Error(ErrorCode::kInvalidParam, "bbox margin must be a finite value >= 0");
  }
  double x0 = std::numeric_limits<double>::infinity();
  double y0 = x0;
  double x1 = -x0;
  double y1 = -x0;
  bool any = false;
  const bool predicted = pose.source != PoseSource::kGroundTruth;
  for (const auto& kp : pose.keypoints) {
    if (!kp.labeled() || (predicted && !(kp.score > 0.0f))) continue;
    any = true;
    x0 = std::min(x0, static_cast<double>(kp.x));
    y0 = std::min(y0, static_cast<double>(kp.y));
    x1 = std::max(x1, static_cast<double>(kp.x));
    y1 = std::max(y1, static_cast<double>(kp.y));
  }
  if (!any) throw Error(ErrorCode::kNoVisibleKeypoints, "pose has no participating keypoints");
  const double w = x1 - x0;
  const double h = y1 - y0;
  const double grow = margin * std::max(w, h);
  return {x0 - grow, y0 - grow, std::max(0.0, w + 2 * grow), std::max(0.0, h + 2 * grow)};
}

}  // namespace lowpose
