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

#include "lowpose/codec.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "lowpose/hungarian.hpp"

namespace lowpose {

void CodecConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw Error(ErrorCode::kInvalidParam, what);
  };
  require(keypoint_count >= 1, "codec keypoint_count must be >= 1");
  require(std::isfinite(heatmap_sigma) && heatmap_sigma > 0.0, "codec heatmap_sigma must be > 0");
  require(output_stride >= 1, "codec output_stride must be >= 1");
  require(std::isfinite(peak_threshold) && peak_threshold > 0.0, "codec peak_threshold must be > 0");
  require(local_max_window >= 1 && local_max_window % 2 == 1, "codec local_max_window must be odd");
  require(max_people >= 1, "codec max_people must be >= 1");
  require(std::isfinite(tag_group_threshold) && tag_group_threshold > 0.0,
          "codec tag_group_threshold must be > 0");
  require(std::isfinite(offset_radius) && offset_radius > 0.0, "codec offset_radius must be > 0");
}

int map_extent(int image_extent, const CodecConfig& cfg) {
  return (image_extent + cfg.output_stride - 1) / cfg.output_stride;
}

std::vector<PersonAnnotation> to_map_space(const std::vector<PersonAnnotation>& anns,
                                           const CodecConfig& cfg) {
  const double s = cfg.output_stride;
  std::vector<PersonAnnotation> out = anns;
  for (auto& a : out) {
    for (auto& kp : a.keypoints) {
      kp.x = static_cast<float>(kp.x / s);
      kp.y = static_cast<float>(kp.y / s);
    }
    a.bbox = {a.bbox.x / s, a.bbox.y / s, a.bbox.w / s, a.bbox.h / s};
    a.area /= s * s;
  }
  return out;
}

namespace {

bool in_bounds(double x, double y, int w, int h) {
  return x >= 0.0 && y >= 0.0 && x <= w - 1.0 && y <= h - 1.0;
}

void splat(Tensor3f& maps, int channel, double cx, double cy, double sigma) {
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  const int x0 = std::max(0, static_cast<int>(std::floor(cx)) - radius);
  const int x1 = std::min(maps.width - 1, static_cast<int>(std::ceil(cx)) + radius);
  const int y0 = std::max(0, static_cast<int>(std::floor(cy)) - radius);
  const int y1 = std::min(maps.height - 1, static_cast<int>(std::ceil(cy)) + radius);
  const double denom = 2.0 * sigma * sigma;
  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) {
      const double d2 = (x - cx) * (x - cx) + (y - cy) * (y - cy);
      float& v = maps.at(channel, y, x);
      v = std::max(v, static_cast<float>(std::exp(-d2 / denom)));
    }
  }
}

struct PersonLayout {
  bool has_center = false;
  Point2 center;
  std::vector<int> keypoints;  // labeled and in bounds
};

std::vector<PersonLayout> layout(const std::vector<PersonAnnotation>& anns, int k, int map_w,
                                 int map_h) {
  std::vector<PersonLayout> out;
  out.reserve(anns.size());
  for (const auto& a : anns) {
    if (static_cast<int>(a.keypoints.size()) != k) {
      throw Error(ErrorCode::kShapeMismatch, "annotation " + std::to_string(a.id) + " has " +
                                                 std::to_string(a.keypoints.size()) +
                                                 " keypoints, expected " + std::to_string(k));
    }
    PersonLayout p;
    for (int j = 0; j < k; ++j) {
      const auto& kp = a.keypoints[j];
      if (kp.labeled() && in_bounds(kp.x, kp.y, map_w, map_h)) p.keypoints.push_back(j);
    }
    if (a.labeled_count() > 0) {
      p.center = labeled_centroid(a.keypoints);
      p.has_center = in_bounds(p.center.x, p.center.y, map_w, map_h);
    }
    out.push_back(std::move(p));
  }
  return out;
}

/// Owner of every pixel inside some center disk, or -1.
std::vector<int> disk_owners(const std::vector<PersonLayout>& people, double radius, int map_w,
                             int map_h) {
  std::vector<int> owner(static_cast<std::size_t>(map_w) * map_h, -1);
  std::vector<double> best(owner.size(), std::numeric_limits<double>::infinity());
  const double r2 = radius * radius;
  for (int i = 0; i < static_cast<int>(people.size()); ++i) {
    if (!people[i].has_center) continue;
    const auto [cx, cy] = people[i].center;
    const int x0 = std::max(0, static_cast<int>(std::floor(cx - radius)));
    const int x1 = std::min(map_w - 1, static_cast<int>(std::ceil(cx + radius)));
    const int y0 = std::max(0, static_cast<int>(std::floor(cy - radius)));
    const int y1 = std::min(map_h - 1, static_cast<int>(std::ceil(cy + radius)));
    for (int y = y0; y <= y1; ++y) {
      for (int x = x0; x <= x1; ++x) {
        const double d2 = (x - cx) * (x - cx) + (y - cy) * (y - cy);
        const std::size_t idx = static_cast<std::size_t>(y) * map_w + x;
        if (d2 <= r2 && d2 < best[idx]) {
          best[idx] = d2;
          owner[idx] = i;
        }
      }
    }
  }
  return owner;
}

void check_map_size(int map_w, int map_h) {
  if (map_w < 1 || map_h < 1) throw Error(ErrorCode::kInvalidParam, "map size must be >= 1");
}

double supervision_diagonal(const BoundingBox& bbox) {
  // Degenerate boxes (one labeled keypoint) would divide by zero; treat them
  // as unit-diagonal.
  return std::max(1.0, bbox.diagonal());
}

}  // namespace

std::vector<OffsetSupervision> encode_offset_supervision(const std::vector<PersonAnnotation>& anns,
                                                         const CodecConfig& cfg, int map_w,
                                                         int map_h) {
  cfg.validate();
  check_map_size(map_w, map_h);
  const auto people = layout(anns, cfg.keypoint_count, map_w, map_h);
  const auto owner = disk_owners(people, cfg.offset_radius, map_w, map_h);
  std::vector<OffsetSupervision> out(anns.size());
  for (std::size_t i = 0; i < anns.size(); ++i) {
    out[i].keypoints = people[i].keypoints;
    out[i].bbox = anns[i].bbox;
  }
  for (std::size_t idx = 0; idx < owner.size(); ++idx) {
    if (owner[idx] >= 0) out[owner[idx]].pixels.push_back(static_cast<int>(idx));
  }
  return out;
}

TargetMaps encode_targets(const std::vector<PersonAnnotation>& anns, const CodecConfig& cfg,
                          int map_w, int map_h) {
  cfg.validate();
  check_map_size(map_w, map_h);
  const int k = cfg.keypoint_count;
  TargetMaps t;
  t.heatmaps = Tensor3f(k + 1, map_h, map_w, 0.0f);
  t.offsets = Tensor3f(2 * k, map_h, map_w, 0.0f);
  t.heatmap_weight = Tensor3f(k + 1, map_h, map_w, 1.0f);
  t.offset_weight = Tensor3f(2 * k, map_h, map_w, 0.0f);

  const auto people = layout(anns, k, map_w, map_h);
  for (std::size_t i = 0; i < anns.size(); ++i) {
    for (int j : people[i].keypoints) {
      splat(t.heatmaps, j, anns[i].keypoints[j].x, anns[i].keypoints[j].y, cfg.heatmap_sigma);
    }
    if (people[i].has_center) {
      splat(t.heatmaps, k, people[i].center.x, people[i].center.y, cfg.heatmap_sigma);
    }
  }

  const auto supervision = encode_offset_supervision(anns, cfg, map_w, map_h);
  for (std::size_t i = 0; i < anns.size(); ++i) {
    const float weight = static_cast<float>(1.0 / supervision_diagonal(anns[i].bbox));
    for (int idx : supervision[i].pixels) {
      const int qx = idx % map_w;
      const int qy = idx / map_w;
      for (int j : supervision[i].keypoints) {
        const auto& kp = anns[i].keypoints[j];
        t.offsets.at(2 * j, qy, qx) = static_cast<float>(double(kp.x) - qx);
        t.offsets.at(2 * j + 1, qy, qx) = static_cast<float>(double(kp.y) - qy);
        t.offset_weight.at(2 * j, qy, qx) = weight;
        t.offset_weight.at(2 * j + 1, qy, qx) = weight;
      }
    }
  }
  return t;
}

std::vector<std::vector<TagIndex>> encode_tag_targets(const std::vector<PersonAnnotation>& anns,
                                                      const CodecConfig& cfg, int map_w, int map_h) {
  cfg.validate();
  check_map_size(map_w, map_h);
  std::vector<std::vector<TagIndex>> out;
  out.reserve(anns.size());
  for (const auto& a : anns) {
    if (static_cast<int>(a.keypoints.size()) != cfg.keypoint_count) {
      throw Error(ErrorCode::kShapeMismatch, "annotation " + std::to_string(a.id) +
                                                 " has the wrong keypoint count");
    }
    std::vector<TagIndex> person;
    for (int j = 0; j < cfg.keypoint_count; ++j) {
      const auto& kp = a.keypoints[j];
      if (!kp.labeled()) continue;
      const long x = std::lround(kp.x);
      const long y = std::lround(kp.y);
      if (x < 0 || y < 0 || x >= map_w || y >= map_h) continue;
      person.push_back({j, static_cast<int>(y * map_w + x)});
    }
    out.push_back(std::move(person));
  }
  return out;
}

std::vector<Peak> find_peaks(const Tensor3f& maps, int channel, double threshold, int window) {
  const int r = window / 2;
  std::vector<Peak> peaks;
  for (int y = 0; y < maps.height; ++y) {
    for (int x = 0; x < maps.width; ++x) {
      const float v = maps.at(channel, y, x);
      if (!(v >= threshold)) continue;
      bool is_max = true;
      for (int dy = -r; dy <= r && is_max; ++dy) {
        for (int dx = -r; dx <= r; ++dx) {
          if (dx == 0 && dy == 0) continue;
          const int nx = x + dx;
          const int ny = y + dy;
          if (nx < 0 || ny < 0 || nx >= maps.width || ny >= maps.height) continue;
          const float n = maps.at(channel, ny, nx);
          const bool later = dy > 0 || (dy == 0 && dx > 0);
          if (n > v || (n == v && !later)) {
            is_max = false;
            break;
          }
        }
      }
      if (is_max) peaks.push_back({x, y, v});
    }
  }
  std::stable_sort(peaks.begin(), peaks.end(),
                   [](const Peak& a, const Peak& b) { return a.activation > b.activation; });
  return peaks;
}

namespace {

float clamp01(float v) { return std::isnan(v) ? 0.0f : std::clamp(v, 0.0f, 1.0f); }

}  // namespace

std::vector<Pose> decode_center_poses(const Tensor3f& heatmaps, const Tensor3f& offsets,
                                      const CodecConfig& cfg) {
  cfg.validate();
  const int k = heatmaps.channels - 1;
  if (k < 1 || offsets.channels != 2 * k || offsets.height != heatmaps.height ||
      offsets.width != heatmaps.width) {
    throw Error(ErrorCode::kShapeMismatch,
                "center decoding needs (K+1) heatmaps and 2K offsets of equal size");
  }
  auto peaks = find_peaks(heatmaps, k, cfg.peak_threshold, cfg.local_max_window);
  if (static_cast<int>(peaks.size()) > cfg.max_people) peaks.resize(cfg.max_people);

  std::vector<Pose> poses;
  poses.reserve(peaks.size());
  for (const auto& pk : peaks) {
    std::vector<Keypoint> kps(k);
    for (int j = 0; j < k; ++j) {
      const double x = pk.x + double(offsets.at(2 * j, pk.y, pk.x));
      const double y = pk.y + double(offsets.at(2 * j + 1, pk.y, pk.x));
      const int sx = std::clamp(static_cast<int>(std::lround(x)), 0, heatmaps.width - 1);
      const int sy = std::clamp(static_cast<int>(std::lround(y)), 0, heatmaps.height - 1);
      kps[j] = {static_cast<float>(x), static_cast<float>(y), 2, clamp01(heatmaps.at(j, sy, sx))};
    }
    poses.push_back(Pose::from_keypoints(std::move(kps), clamp01(pk.activation), PoseSource::kMain));
  }
  return poses;
}

CandidateLists extract_keypoint_peaks(const Tensor3f& heatmaps, const TagMap& tags,
                                      const CodecConfig& cfg) {
  cfg.validate();
  if (!heatmaps.same_shape(tags.tags)) {
    throw Error(ErrorCode::kShapeMismatch, "keypoint heatmaps and tag map differ in shape");
  }
  CandidateLists out(heatmaps.channels);
  for (int j = 0; j < heatmaps.channels; ++j) {
    auto peaks = find_peaks(heatmaps, j, cfg.peak_threshold, cfg.local_max_window);
    if (static_cast<int>(peaks.size()) > cfg.max_people) peaks.resize(cfg.max_people);
    for (const auto& p : peaks) {
      out[j].push_back({p.x, p.y, p.activation, tags.tags.at(j, p.y, p.x)});
    }
  }
  return out;
}

namespace {

struct Cluster {
  std::vector<int> candidate_of_type;  // -1 when missing
  double tag_sum = 0.0;
  int members = 0;

  double mean_tag() const { return tag_sum / members; }
};

}  // namespace

std::vector<Pose> group_keypoints(const CandidateLists& candidates, const CodecConfig& cfg) {
  cfg.validate();
  const int k = static_cast<int>(candidates.size());
  std::vector<Cluster> clusters;

  auto open_cluster = [&](int type, int cand) {
    Cluster c;
    c.candidate_of_type.assign(k, -1);
    c.candidate_of_type[type] = cand;
    c.tag_sum = candidates[type][cand].tag;
    c.members = 1;
    clusters.push_back(std::move(c));
  };

  for (int type = 0; type < k; ++type) {
    const auto& cands = candidates[type];
    if (cands.empty()) continue;
    if (clusters.empty()) {
      for (int c = 0; c < static_cast<int>(cands.size()); ++c) open_cluster(type, c);
      continue;
    }
    const int existing = static_cast<int>(clusters.size());
    CostMatrix cost(static_cast<int>(cands.size()), existing);
    for (int c = 0; c < cost.rows; ++c) {
      for (int p = 0; p < existing; ++p) {
        cost(c, p) = std::abs(double(cands[c].tag) - clusters[p].mean_tag()) -
                     kGroupingActivationEpsilon * cands[c].activation;
      }
    }
    std::vector<int> target(cands.size(), -1);
    for (const auto& [c, p] : hungarian_assign(cost)) {
      if (std::abs(double(cands[c].tag) - clusters[p].mean_tag()) <= cfg.tag_group_threshold) {
        target[c] = p;
      }
    }
    for (int c = 0; c < static_cast<int>(cands.size()); ++c) {
      if (target[c] < 0) {
        open_cluster(type, c);
        continue;
      }
      Cluster& cl = clusters[target[c]];
      cl.candidate_of_type[type] = c;
      cl.tag_sum += cands[c].tag;
      ++cl.members;
    }
  }

  std::vector<Pose> poses;
  poses.reserve(clusters.size());
  for (const auto& cl : clusters) {
    std::vector<Keypoint> kps(k, Keypoint{0.0f, 0.0f, 0, 0.0f});
    double act = 0.0;
    for (int type = 0; type < k; ++type) {
      const int c = cl.candidate_of_type[type];
      if (c < 0) continue;
      const auto& cand = candidates[type][c];
      kps[type] = {float(cand.x), float(cand.y), 2, clamp01(cand.activation)};
      act += cand.activation;
    }
    poses.push_back(Pose::from_keypoints(std::move(kps), clamp01(float(act / cl.members)),
                                         PoseSource::kComplementary));
  }
  std::stable_sort(poses.begin(), poses.end(),
                   [](const Pose& a, const Pose& b) { return a.score > b.score; });
  return poses;
}

}  // namespace lowpose
