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

#include <utility>
#include <vector>

#include "lowpose/core.hpp"
#include "lowpose/rng.hpp"
#include "lowpose/schema.hpp"

namespace lowpose {

struct Range {
  double lo = 0.0;
  double hi = 0.0;

  bool valid() const noexcept { return lo <= hi; }
  bool operator==(const Range&) const = default;
};

struct IntRange {
  int lo = 0;
  int hi = 0;

  bool valid() const noexcept { return lo <= hi; }
  bool operator==(const IntRange&) const = default;
};

/// Extreme low-light augmentation parameters.
struct EllaParams {
  Range gamma_range{2.0, 5.0};
  Range brightness_range{0.01, 0.05};
  Range contrast_range{0.2, 1.0};
  Range noise_var_range{0.0, 40.0};
  double per_aug_probability = 0.5;

  void validate() const;
  bool operator==(const EllaParams&) const = default;
};

/// Stage-two variant: gamma and brightness are always applied, and a few
/// random patches are occasionally restored to the original pixels.
struct AdjustedEllaParams {
  EllaParams ella;
  double patch_restore_probability = 0.15;
  IntRange patch_count_range{1, 3};
  Range patch_size_fraction_range{0.1, 0.3};

  void validate() const;
  bool operator==(const AdjustedEllaParams&) const = default;
};

struct PdaParams {
  Range brightness_range{0.1, 0.5};
  double bbox_margin = 0.1;

  void validate() const;
  bool operator==(const PdaParams&) const = default;
};

struct AffineParams {
  Range rotation_range{-30.0, 30.0};
  Range scale_range{0.75, 1.5};
  Range translation_range{-40.0, 40.0};
  double flip_probability = 0.5;
  int output_size = 512;

  void validate() const;
  bool operator==(const AffineParams&) const = default;
};

// Closed-form degradations. Every output is clamped to [0, 255].

Image gamma_correct(const Image& img, double gamma);
Image adjust_brightness(const Image& img, double b);
/// Blends each pixel toward its luma (0.299 R + 0.587 G + 0.114 B).
Image reduce_contrast(const Image& img, double c);
/// Adds i.i.d. N(0, var) per pixel and channel.
Image add_gaussian_noise(const Image& img, double var, Rng& rng);

/// gamma -> brightness -> contrast -> noise, each kept with
/// per_aug_probability and parameterised by a uniform draw.
Image ella(const Image& img, const EllaParams& params, Rng& rng);

struct AdjustedEllaResult {
  Image image;
  std::vector<BoundingBox> restored_patches;
};

AdjustedEllaResult adjust_ella(const Image& img, const AdjustedEllaParams& params, Rng& rng);

/// Darkens each pose's box by its own brightness draw. Boxes are clipped to
/// the image and cover the pixel columns floor(x)..ceil(x + w) inclusive.
/// Poses with no participating keypoints are skipped.
Image pda(const Image& img, const std::vector<Pose>& poses, const PdaParams& params, Rng& rng);

/// One concrete draw of the affine augmentation.
struct AffineSample {
  double rotation_deg = 0.0;
  double scale = 1.0;
  double tx = 0.0;
  double ty = 0.0;
  bool flip = false;
};

/// Row-major 2x3 matrix mapping input pixel coordinates to output ones.
struct Affine2x3 {
  double m[6] = {1, 0, 0, 0, 1, 0};

  Point2 apply(double x, double y) const {
    return {m[0] * x + m[1] * y + m[2], m[3] * x + m[4] * y + m[5]};
  }
  Affine2x3 inverse() const;
};

/// Flip (x -> W-1-x), then rotate and scale about the input center, move
/// the center onto the output center and translate.
Affine2x3 affine_matrix(const AffineSample& sample, int in_width, int in_height,
                        int out_width, int out_height);

struct AffineResult {
  Image image;
  std::vector<PersonAnnotation> annotations;
};

/// Warps with bilinear sampling and zero fill. Keypoints landing outside the
/// output are marked unlabeled; flips also permute left/right keypoints.
AffineResult apply_affine(const Image& img, const std::vector<PersonAnnotation>& anns,
                          const AffineSample& sample, int out_width, int out_height,
                          const KeypointSchema& schema);

AffineSample sample_affine(const AffineParams& params, Rng& rng);

AffineResult random_affine(const Image& img, const std::vector<PersonAnnotation>& anns,
                           const AffineParams& params, const KeypointSchema& schema, Rng& rng);

}  // namespace lowpose
