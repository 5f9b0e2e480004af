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

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "lowpose/error.hpp"

namespace lowpose {

inline constexpr int kDefaultKeypointCount = 14;

/// H x W x C raster of 8-bit-scale intensities stored as floats in [0, 255],
/// row-major with interleaved channels.
class Image {
 public:
  Image() = default;
  Image(int width, int height, int channels, float fill = 0.0f);
  Image(int width, int height, int channels, std::vector<float> data);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  int channels() const noexcept { return channels_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  float at(int x, int y, int c) const { return data_[index(x, y, c)]; }
  float& at(int x, int y, int c) { return data_[index(x, y, c)]; }

  std::span<const float> data() const noexcept { return data_; }
  std::span<float> data() noexcept { return data_; }

  /// Throws kInvalidParam if the dimensions or any stored value violate the
  /// image invariants.
  void validate() const;

  /// Clamps every value into [0, 255].
  void clamp();

  bool operator==(const Image&) const = default;

 private:
  std::size_t index(int x, int y, int c) const noexcept {
    return (static_cast<std::size_t>(y) * width_ + x) * channels_ + c;
  }

  int width_ = 0;
  int height_ = 0;
  int channels_ = 0;
  std::vector<float> data_;
};

struct Point2 {
  double x = 0.0;
  double y = 0.0;
  bool operator==(const Point2&) const = default;
};

/// Visibility follows the COCO convention: 0 unlabeled, 1 labeled but
/// occluded, 2 labeled and visible.
struct Keypoint {
  float x = 0.0f;
  float y = 0.0f;
  int v = 0;
  float score = 1.0f;

  bool labeled() const noexcept { return v > 0; }
  bool operator==(const Keypoint&) const = default;
};

enum class PoseSource : std::uint8_t { kMain, kComplementary, kGroundTruth };

struct BoundingBox {
  double x = 0.0;
  double y = 0.0;
  double w = 0.0;
  double h = 0.0;

  double area() const noexcept { return w * h; }
  double diagonal() const noexcept;
  bool operator==(const BoundingBox&) const = default;
};

struct Pose {
  std::vector<Keypoint> keypoints;
  Point2 center;
  float score = 0.0f;
  PoseSource source = PoseSource::kGroundTruth;

  /// Builds a pose whose center is the mean of its labeled keypoints.
  static Pose from_keypoints(std::vector<Keypoint> keypoints, float score, PoseSource source);

  int labeled_count() const noexcept;
  void recompute_center();
  void validate(int keypoint_count) const;

  bool operator==(const Pose&) const = default;
};

struct PersonAnnotation {
  std::int64_t id = 0;
  std::int64_t image_id = 0;
  std::vector<Keypoint> keypoints;
  BoundingBox bbox;
  double area = 0.0;

  int labeled_count() const noexcept;
  void validate(int keypoint_count) const;

  /// Ground-truth pose view of this annotation.
  Pose to_pose() const;

  bool operator==(const PersonAnnotation&) const = default;
};

/// Dense C x H x W tensor, channel-major.
template <class T>
struct Tensor3 {
  int channels = 0;
  int height = 0;
  int width = 0;
  std::vector<T> data;

  Tensor3() = default;
  Tensor3(int c, int h, int w, T fill = T{})
      : channels(c), height(h), width(w),
        data(static_cast<std::size_t>(c) * h * w, fill) {}

  std::size_t plane() const noexcept { return static_cast<std::size_t>(height) * width; }
  std::size_t offset(int c, int y, int x) const noexcept {
    return static_cast<std::size_t>(c) * plane() + static_cast<std::size_t>(y) * width + x;
  }
  T& at(int c, int y, int x) { return data[offset(c, y, x)]; }
  const T& at(int c, int y, int x) const { return data[offset(c, y, x)]; }

  bool same_shape(const Tensor3& o) const noexcept {
    return channels == o.channels && height == o.height && width == o.width;
  }

  template <class U>
  Tensor3<U> cast() const {
    Tensor3<U> out(channels, height, width);
    for (std::size_t i = 0; i < data.size(); ++i) out.data[i] = static_cast<U>(data[i]);
    return out;
  }

  bool operator==(const Tensor3&) const = default;
};

using Tensor3f = Tensor3<float>;

/// Training targets for the center-based representation. Heatmap channel K
/// is the person-center channel; offset channels 2k / 2k+1 hold dx / dy from
/// the pixel to keypoint k.
struct TargetMaps {
  Tensor3f heatmaps;
  Tensor3f offsets;
  Tensor3f heatmap_weight;
  Tensor3f offset_weight;

  int keypoint_count() const noexcept { return heatmaps.channels - 1; }
  void validate() const;
};

/// Scalar associative-embedding tags, one plane per keypoint type.
struct TagMap {
  Tensor3f tags;
};

/// Where keypoint `keypoint` of a person is read from a tag map: plane
/// `keypoint`, flat pixel index y * width + x.
struct TagIndex {
  int keypoint = 0;
  int pixel = 0;
  bool operator==(const TagIndex&) const = default;
};

/// The offset entries one person is supervised on: the pixels of the
/// person's center disk, the labeled keypoints whose channels count, and the
/// bbox whose diagonal normalises the person's contribution.
struct OffsetSupervision {
  std::vector<int> pixels;
  std::vector<int> keypoints;
  BoundingBox bbox;
};

/// Axis-aligned hull of the participating keypoints, grown by
/// margin * max(w, h) on every side. Ground-truth keypoints participate when
/// labeled; predicted keypoints additionally need a positive score.
BoundingBox pose_bbox(const Pose& pose, double margin);

/// Mean of the labeled keypoints; throws kNoLabeledKeypoints if none.
Point2 labeled_centroid(std::span<const Keypoint> keypoints);

}  // namespace lowpose
