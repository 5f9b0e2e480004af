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

#include "lowpose/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <tuple>

namespace lowpose {

void FusionConfig::validate(int keypoint_count) const {
  auto unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (!unit(s_m) || !unit(s_c) || !unit(nms_oks_threshold)) {
    throw Error(ErrorCode::kInvalidParam, "fusion thresholds must lie in [0, 1]");
  }
  if (static_cast<int>(kpt_sigmas.size()) != keypoint_count) {
    throw Error(ErrorCode::kInvalidParam, "fusion kpt_sigmas needs " +
                                              std::to_string(keypoint_count) + " entries");
  }
  for (double s : kpt_sigmas) {
    if (!(s > 0.0) || !std::isfinite(s)) {
      throw Error(ErrorCode::kInvalidParam, "fusion kpt_sigmas must be > 0");
    }
  }
}

std::vector<Pose> select_confident(const std::vector<Pose>& poses, double threshold) {
  std::vector<Pose> out;
  std::copy_if(poses.begin(), poses.end(), std::back_inserter(out),
               [threshold](const Pose& p) { return p.score > threshold; });
  return out;
}

double pose_oks(const Pose& candidate, const Pose& reference, double area,
                std::span<const double> sigmas) {
  if (!(area > 0.0)) throw Error(ErrorCode::kNonPositiveArea, "OKS area must be > 0");
  const std::size_t k = reference.keypoints.size();
  if (candidate.keypoints.size() != k || sigmas.size() != k) {
    throw Error(ErrorCode::kShapeMismatch, "OKS operands differ in keypoint count");
  }
  double sum = 0.0;
  int labeled = 0;
  for (std::size_t j = 0; j < k; ++j) {
    const auto& r = reference.keypoints[j];
    if (!r.labeled()) continue;
    const auto& c = candidate.keypoints[j];
    const double dx = double(c.x) - r.x;
    const double dy = double(c.y) - r.y;
    sum += std::exp(-(dx * dx + dy * dy) / (2.0 * area * sigmas[j] * sigmas[j]));
    ++labeled;
  }
  if (labeled == 0) throw Error(ErrorCode::kNoLabeledKeypoints, "OKS reference has no labeled keypoints");
  return sum / labeled;
}

double pose_reference_area(const Pose& pose) {
  try {
    return std::max(1.0, pose_bbox(pose, 0.0).area());
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kNoVisibleKeypoints) throw;
    return 1.0;
  }
}

namespace {

int source_rank(PoseSource s) {
  switch (s) {
    case PoseSource::kMain: return 0;
    case PoseSource::kComplementary: return 1;
    case PoseSource::kGroundTruth: return 2;
  }
  return 3;
}

/// OKS that treats a reference without labeled keypoints as dissimilar.
double oks_or_zero(const Pose& candidate, const Pose& reference, double area,
                   std::span<const double> sigmas) {
  if (reference.labeled_count() == 0) return 0.0;
  return pose_oks(candidate, reference, area, sigmas);
}

}  // namespace

std::vector<Pose> pose_nms(const std::vector<Pose>& poses, const FusionConfig& cfg) {
  std::vector<int> order(poses.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    if (poses[a].score != poses[b].score) return poses[a].score > poses[b].score;
    return source_rank(poses[a].source) < source_rank(poses[b].source);
  });

  std::vector<char> removed(poses.size(), 0);
  std::vector<Pose> kept;
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (removed[order[i]]) continue;
    const Pose& best = poses[order[i]];
    kept.push_back(best);
    const double area = pose_reference_area(best);
    for (std::size_t j = i + 1; j < order.size(); ++j) {
      if (removed[order[j]]) continue;
      if (oks_or_zero(poses[order[j]], best, area, cfg.kpt_sigmas) > cfg.nms_oks_threshold) {
        removed[order[j]] = 1;
      }
    }
  }
  return kept;
}

std::vector<Pose> fuse_dual(const std::vector<Pose>& main_poses, const std::vector<Pose>& comp_poses,
                            const FusionConfig& cfg) {
  std::vector<Pose> all = select_confident(main_poses, cfg.s_m);
  const auto comp = select_confident(comp_poses, cfg.s_c);
  all.insert(all.end(), comp.begin(), comp.end());
  return pose_nms(all, cfg);
}

namespace {

/// For each label, the index of its ground-truth match (or -1).
std::vector<int> match_labels(const std::vector<Pose>& labels,
                              const std::vector<PersonAnnotation>& gts, double threshold,
                              std::span<const double> sigmas) {
  std::vector<std::tuple<double, int, int>> pairs;
  for (int g = 0; g < static_cast<int>(gts.size()); ++g) {
    if (gts[g].labeled_count() == 0) continue;
    const Pose ref = gts[g].to_pose();
    for (int l = 0; l < static_cast<int>(labels.size()); ++l) {
      const double oks = pose_oks(labels[l], ref, gts[g].area, sigmas);
      if (oks >= threshold) pairs.emplace_back(oks, l, g);
    }
  }
  std::stable_sort(pairs.begin(), pairs.end(),
                   [](const auto& a, const auto& b) { return std::get<0>(a) > std::get<0>(b); });
  std::vector<int> match(labels.size(), -1);
  std::vector<char> gt_used(gts.size(), 0);
  for (const auto& [oks, l, g] : pairs) {
    if (match[l] >= 0 || gt_used[g]) continue;
    match[l] = g;
    gt_used[g] = 1;
  }
  return match;
}

}  // namespace

std::vector<PseudoLabelRow> pseudo_label_stats(const PseudoLabelInputs& in,
                                               const std::vector<double>& oks_thresholds,
                                               double overlap_threshold,
                                               std::span<const double> sigmas) {
  if (in.main.size() != in.gt.size() || in.comp.size() != in.gt.size()) {
    throw Error(ErrorCode::kImageIdMismatch, "pseudo-label inputs cover different image sets");
  }
  std::vector<PseudoLabelRow> rows;
  for (double tau : oks_thresholds) {
    PseudoLabelRow row;
    row.oks_threshold = tau;
    for (std::size_t img = 0; img < in.gt.size(); ++img) {
      const auto main_match = match_labels(in.main[img], in.gt[img], tau, sigmas);
      const auto comp_match = match_labels(in.comp[img], in.gt[img], tau, sigmas);
      std::vector<const Pose*> valid_main;
      for (std::size_t i = 0; i < main_match.size(); ++i) {
        if (main_match[i] >= 0) valid_main.push_back(&in.main[img][i]);
      }
      row.n_main_valid += static_cast<int>(valid_main.size());
      for (std::size_t i = 0; i < comp_match.size(); ++i) {
        if (comp_match[i] < 0) continue;
        ++row.n_comp_valid;
        const double area = in.gt[img][comp_match[i]].area;
        const bool overlaps = std::any_of(valid_main.begin(), valid_main.end(), [&](const Pose* m) {
          return oks_or_zero(in.comp[img][i], *m, area, sigmas) >= overlap_threshold;
        });
        if (!overlaps) ++row.n_additional;
      }
    }
    row.pct_additional = row.n_main_valid > 0 ? 100.0 * row.n_additional / row.n_main_valid : 0.0;
    rows.push_back(row);
  }
  return rows;
}

Point2 center_of(const Pose& pose) { return labeled_centroid(pose.keypoints); }

}  // namespace lowpose
