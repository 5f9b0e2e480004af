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

#include "lowpose/augment.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace lowpose {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::kInvalidParam, what);
}

bool finite_range(const Range& r) {
  return std::isfinite(r.lo) && std::isfinite(r.hi) && r.valid();
}

bool probability(double p) { return p >= 0.0 && p <= 1.0; }

float clamp255(double v) {
  if (std::isnan(v)) return 0.0f;
  return static_cast<float>(std::clamp(v, 0.0, 255.0));
}

template <class F>
Image map_values(const Image& img, F&& f) {
  Image out = img;
  for (float& v : out.data()) v = clamp255(f(static_cast<double>(v)));
  return out;
}

}  // namespace

void EllaParams::validate() const {
  require(finite_range(gamma_range) && gamma_range.lo > 0.0, "ella gamma_range must be a valid range > 0");
  require(finite_range(brightness_range) && brightness_range.lo >= 0.0,
          "ella brightness_range must be a valid range >= 0");
  require(finite_range(contrast_range) && contrast_range.lo >= 0.0 && contrast_range.hi <= 1.0,
          "ella contrast_range must lie in [0, 1]");
  require(finite_range(noise_var_range) && noise_var_range.lo >= 0.0,
          "ella noise_var_range must be a valid range >= 0");
  require(probability(per_aug_probability), "ella per_aug_probability must lie in [0, 1]");
}

void AdjustedEllaParams::validate() const {
  ella.validate();
  require(probability(patch_restore_probability), "patch_restore_probability must lie in [0, 1]");
  require(patch_count_range.valid() && patch_count_range.lo >= 0, "patch_count_range is invalid");
  require(finite_range(patch_size_fraction_range) && patch_size_fraction_range.lo > 0.0 &&
              patch_size_fraction_range.hi <= 1.0,
          "patch_size_fraction_range must lie in (0, 1]");
}

void PdaParams::validate() const {
  require(finite_range(brightness_range) && brightness_range.lo > 0.0 && brightness_range.hi <= 1.0,
          "pda brightness_range must lie in (0, 1]");
  require(std::isfinite(bbox_margin) && bbox_margin >= 0.0, "pda bbox_margin must be >= 0");
}

void AffineParams::validate() const {
  require(finite_range(rotation_range), "affine rotation_range is invalid");
  require(finite_range(scale_range) && scale_range.lo > 0.0, "affine scale_range must be > 0");
  require(finite_range(translation_range), "affine translation_range is invalid");
  require(probability(flip_probability), "affine flip_probability must lie in [0, 1]");
  require(output_size >= 1, "affine output_size must be >= 1");
}

Image gamma_correct(const Image& img, double gamma) {
  require(std::isfinite(gamma) && gamma > 0.0, "gamma must be finite and > 0");
  return map_values(img, [gamma](double v) { return 255.0 * std::pow(v / 255.0, gamma); });
}

Image adjust_brightness(const Image& img, double b) {
  require(std::isfinite(b) && b >= 0.0, "brightness factor must be finite and >= 0");
  return map_values(img, [b](double v) { return b * v; });
}

Image reduce_contrast(const Image& img, double c) {
  require(std::isfinite(c) && c >= 0.0 && c <= 1.0, "contrast factor must lie in [0, 1]");
  if (img.channels() == 1) {
    // The greyscale of a greyscale image is itself, so the blend is exact.
    return img;
  }
  Image out = img;
  auto px = out.data();
  for (std::size_t i = 0; i < px.size(); i += 3) {
    const double grey = 0.299 * px[i] + 0.587 * px[i + 1] + 0.114 * px[i + 2];
    for (std::size_t ch = 0; ch < 3; ++ch) {
      px[i + ch] = clamp255(c * px[i + ch] + (1.0 - c) * grey);
    }
  }
  return out;
}

Image add_gaussian_noise(const Image& img, double var, Rng& rng) {
  require(std::isfinite(var) && var >= 0.0, "noise variance must be finite and >= 0");
  if (var == 0.0) return img;
  const double stddev = std::sqrt(var);
  return map_values(img, [&](double v) { return v + rng.normal(stddev); });
}

Image ella(const Image& img, const EllaParams& params, Rng& rng) {
  params.validate();
  const double p = params.per_aug_probability;
  Image out = img;
  if (rng.bernoulli(p)) {
    out = gamma_correct(out, rng.uniform(params.gamma_range.lo, params.gamma_range.hi));
  }
  if (rng.bernoulli(p)) {
    out = adjust_brightness(out, rng.uniform(params.brightness_range.lo, params.brightness_range.hi));
  }
  if (rng.bernoulli(p)) {
    out = reduce_contrast(out, rng.uniform(params.contrast_range.lo, params.contrast_range.hi));
  }
  if (rng.bernoulli(p)) {
    out = add_gaussian_noise(out, rng.uniform(params.noise_var_range.lo, params.noise_var_range.hi),
                             rng);
  }
  return out;
}

AdjustedEllaResult adjust_ella(const Image& img, const AdjustedEllaParams& params, Rng& rng) {
  params.validate();
  const auto& e = params.ella;
  AdjustedEllaResult result;
  result.image = gamma_correct(img, rng.uniform(e.gamma_range.lo, e.gamma_range.hi));
  result.image =
      adjust_brightness(result.image, rng.uniform(e.brightness_range.lo, e.brightness_range.hi));
  if (!rng.bernoulli(params.patch_restore_probability)) return result;

  const int count = rng.uniform_int(params.patch_count_range.lo, params.patch_count_range.hi);
  const auto& frac = params.patch_size_fraction_range;
  const int w = img.width();
  const int h = img.height();
  for (int i = 0; i < count; ++i) {
    const int pw = std::clamp(static_cast<int>(std::lround(rng.uniform(frac.lo, frac.hi) * w)), 1, w);
    const int ph = std::clamp(static_cast<int>(std::lround(rng.uniform(frac.lo, frac.hi) * h)), 1, h);
    const int px = rng.uniform_int(0, w - pw);
    const int py = rng.uniform_int(0, h - ph);
    for (int y = py; y < py + ph; ++y) {
      for (int x = px; x < px + pw; ++x) {
        for (int c = 0; c < img.channels(); ++c) result.image.at(x, y, c) = img.at(x, y, c);
      }
    }
    result.restored_patches.push_back({double(px), double(py), double(pw), double(ph)});
  }
  return result;
}

Image pda(const Image& img, const std::vector<Pose>& poses, const PdaParams& params, Rng& rng) {
  params.validate();
  Image out = img;
  for (const auto& pose : poses) {
    BoundingBox box;
    try {
      box = pose_bbox(pose, params.bbox_margin);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kNoVisibleKeypoints) continue;
      throw;
    }
    const double b = rng.uniform(params.brightness_range.lo, params.brightness_range.hi);
    const double x0 = std::max(0.0, std::floor(box.x));
    const double y0 = std::max(0.0, std::floor(box.y));
    const double x1 = std::min(double(img.width() - 1), std::ceil(box.x + box.w));
    const double y1 = std::min(double(img.height() - 1), std::ceil(box.y + box.h));
    if (x0 > x1 || y0 > y1) continue;
    for (int y = int(y0); y <= int(y1); ++y) {
      for (int x = int(x0); x <= int(x1); ++x) {
        for (int c = 0; c < img.channels(); ++c) {
          out.at(x, y, c) = clamp255(b * out.at(x, y, c));
        }
      }
    }
  }
  return out;
}

Affine2x3 Affine2x3::inverse() const {
  const double det = m[0] * m[4] - m[1] * m[3];
  require(det != 0.0 && std::isfinite(det), "affine matrix is singular");
  Affine2x3 r;
  r.m[0] = m[4] / det;
  r.m[1] = -m[1] / det;
  r.m[3] = -m[3] / det;
  r.m[4] = m[0] / det;
  r.m[2] = -(r.m[0] * m[2] + r.m[1] * m[5]);
  r.m[5] = -(r.m[3] * m[2] + r.m[4] * m[5]);
  return r;
}

Affine2x3 affine_matrix(const AffineSample& s, int in_width, int in_height, int out_width,
                        int out_height) {
  require(std::isfinite(s.scale) && s.scale > 0.0, "affine scale must be > 0");
  const double theta = s.rotation_deg * std::numbers::pi / 180.0;
  // Exact values at the common axis-aligned angles keep identity warps exact.
  const double cs = s.rotation_deg == 0.0 ? 1.0 : std::cos(theta);
  const double sn = s.rotation_deg == 0.0 ? 0.0 : std::sin(theta);
  const double cx = (in_width - 1) / 2.0;
  const double cy = (in_height - 1) / 2.0;
  const double ox = (out_width - 1) / 2.0 + s.tx;
  const double oy = (out_height - 1) / 2.0 + s.ty;
  // Flip as x' = fx * x + fb.
  const double fx = s.flip ? -1.0 : 1.0;
  const double fb = s.flip ? in_width - 1.0 : 0.0;
  Affine2x3 a;
  a.m[0] = s.scale * cs * fx;
  a.m[1] = -s.scale * sn;
  a.m[2] = s.scale * (cs * (fb - cx) + sn * cy) + ox;
  a.m[3] = s.scale * sn * fx;
  a.m[4] = s.scale * cs;
  a.m[5] = s.scale * (sn * (fb - cx) - cs * cy) + oy;
  return a;
}

namespace {

double bilinear(const Image& img, double x, double y, int c) {
  const double fx0 = std::floor(x);
  const double fy0 = std::floor(y);
  if (fx0 < -1.0 || fy0 < -1.0 || fx0 > img.width() || fy0 > img.height()) return 0.0;
  const int x0 = static_cast<int>(fx0);
  const int y0 = static_cast<int>(fy0);
  const double ax = x - fx0;
  const double ay = y - fy0;
  auto px = [&](int xi, int yi) -> double {
    if (xi < 0 || yi < 0 || xi >= img.width() || yi >= img.height()) return 0.0;
    return img.at(xi, yi, c);
  };
  double v = 0.0;
  if ((1 - ax) * (1 - ay) != 0.0) v += (1 - ax) * (1 - ay) * px(x0, y0);
  if (ax * (1 - ay) != 0.0) v += ax * (1 - ay) * px(x0 + 1, y0);
  if ((1 - ax) * ay != 0.0) v += (1 - ax) * ay * px(x0, y0 + 1);
  if (ax * ay != 0.0) v += ax * ay * px(x0 + 1, y0 + 1);
  return v;
}

}  // namespace

AffineResult apply_affine(const Image& img, const std::vector<PersonAnnotation>& anns,
                          const AffineSample& sample, int out_width, int out_height,
                          const KeypointSchema& schema) {
  require(out_width >= 1 && out_height >= 1, "affine output size must be >= 1");
  const Affine2x3 fwd = affine_matrix(sample, img.width(), img.height(), out_width, out_height);
  const Affine2x3 inv = fwd.inverse();

  AffineResult result;
  result.image = Image(out_width, out_height, img.channels());
  for (int y = 0; y < out_height; ++y) {
    for (int x = 0; x < out_width; ++x) {
      const Point2 src = inv.apply(x, y);
      for (int c = 0; c < img.channels(); ++c) {
        result.image.at(x, y, c) = clamp255(bilinear(img, src.x, src.y, c));
      }
    }
  }

  const std::vector<int> perm = schema.flip_permutation();
  const double det_scale = std::abs(fwd.m[0] * fwd.m[4] - fwd.m[1] * fwd.m[3]);
  for (const auto& ann : anns) {
    PersonAnnotation out = ann;
    for (std::size_t k = 0; k < ann.keypoints.size(); ++k) {
      const std::size_t from =
          sample.flip && k < perm.size() && ann.keypoints.size() == perm.size() ? perm[k] : k;
      Keypoint kp = ann.keypoints[from];
      const Point2 p = fwd.apply(kp.x, kp.y);
      kp.x = static_cast<float>(p.x);
      kp.y = static_cast<float>(p.y);
      if (p.x < 0.0 || p.y < 0.0 || p.x > out_width - 1.0 || p.y > out_height - 1.0) kp.v = 0;
      out.keypoints[k] = kp;
    }
    const double bx[4] = {ann.bbox.x, ann.bbox.x + ann.bbox.w, ann.bbox.x, ann.bbox.x + ann.bbox.w};
    const double by[4] = {ann.bbox.y, ann.bbox.y, ann.bbox.y + ann.bbox.h, ann.bbox.y + ann.bbox.h};
    double x0 = 1e300, y0 = 1e300, x1 = -1e300, y1 = -1e300;
    for (int i = 0; i < 4; ++i) {
      // A flip maps pixel x to W-1-x; for box edges that shifts by one pixel,
      // which is below annotation precision and ignored.
      const Point2 p = fwd.apply(bx[i], by[i]);
      x0 = std::min(x0, p.x);
      y0 = std::min(y0, p.y);
      x1 = std::max(x1, p.x);
      y1 = std::max(y1, p.y);
    }
    out.bbox = {x0, y0, x1 - x0, y1 - y0};
    out.area = ann.area * det_scale;
    result.annotations.push_back(std::move(out));
  }
  return result;
}

AffineSample sample_affine(const AffineParams& params, Rng& rng) {
  params.validate();
  AffineSample s;
  s.rotation_deg = rng.uniform(params.rotation_range.lo, params.rotation_range.hi);
  s.scale = rng.uniform(params.scale_range.lo, params.scale_range.hi);
  s.tx = rng.uniform(params.translation_range.lo, params.translation_range.hi);
  s.ty = rng.uniform(params.translation_range.lo, params.translation_range.hi);
  s.flip = rng.bernoulli(params.flip_probability);
  return s;
}

AffineResult random_affine(const Image& img, const std::vector<PersonAnnotation>& anns,
                           const AffineParams& params, const KeypointSchema& schema, Rng& rng) {
  const AffineSample s = sample_affine(params, rng);
  return apply_affine(img, anns, s, params.output_size, params.output_size, schema);
}

}  // namespace lowpose
