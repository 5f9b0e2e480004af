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

#include "lowpose/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <tuple>

#include "lowpose/fusion.hpp"

namespace lowpose {

std::vector<double> coco_oks_thresholds() {
  std::vector<double> t;
  for (int i = 0; i < 10; ++i) t.push_back((50 + 5 * i) / 100.0);
  return t;
}

namespace {

void check_alignment(std::size_t preds, std::size_t gts) {
  if (preds != gts) {
    throw Error(ErrorCode::kImageIdMismatch, "predictions and ground truth cover different images");
  }
}

struct RankedPrediction {
  float score;
  std::size_t image;
  std::size_t index;
};

std::vector<RankedPrediction> rank_predictions(const std::vector<std::vector<Pose>>& preds) {
  std::vector<RankedPrediction> ranked;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    for (std::size_t j = 0; j < preds[i].size(); ++j) {
      const float s = preds[i][j].score;
      if (!std::isfinite(s)) throw Error(ErrorCode::kMissingScores, "prediction without a valid score");
      ranked.push_back({s, i, j});
    }
  }
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.score > b.score; });
  return ranked;
}

}  // namespace

double average_precision(const std::vector<std::vector<Pose>>& preds,
                         const std::vector<std::vector<PersonAnnotation>>& gts, double threshold,
                         std::span<const double> sigmas) {
  check_alignment(preds.size(), gts.size());
  const auto ranked = rank_predictions(preds);

  int n_gt = 0;
  std::vector<std::vector<Pose>> refs(gts.size());
  std::vector<std::vector<int>> ref_index(gts.size());
  for (std::size_t i = 0; i < gts.size(); ++i) {
    for (std::size_t g = 0; g < gts[i].size(); ++g) {
      if (gts[i][g].labeled_count() == 0) continue;
      refs[i].push_back(gts[i][g].to_pose());
      ref_index[i].push_back(static_cast<int>(g));
      ++n_gt;
    }
  }
  if (n_gt == 0) return 0.0;

  std::vector<std::vector<char>> used(gts.size());
  for (std::size_t i = 0; i < gts.size(); ++i) used[i].assign(refs[i].size(), 0);

  std::vector<double> recall;
  std::vector<double> precision;
  int tp = 0;
  int fp = 0;
  for (const auto& r : ranked) {
    double best = -1.0;
    int best_g = -1;
    for (std::size_t g = 0; g < refs[r.image].size(); ++g) {
      if (used[r.image][g]) continue;
      const auto& ann = gts[r.image][ref_index[r.image][g]];
      const double oks = pose_oks(preds[r.image][r.index], refs[r.image][g], ann.area, sigmas);
      if (oks > best) {
        best = oks;
        best_g = static_cast<int>(g);
      }
    }
    if (best_g >= 0 && best >= threshold) {
      used[r.image][best_g] = 1;
      ++tp;
    } else {
      ++fp;
    }
    recall.push_back(double(tp) / n_gt);
    precision.push_back(double(tp) / (tp + fp));
  }

  // Precision envelope, then sample at recall 0.00, 0.01, ..., 1.00.
  for (std::size_t i = precision.size(); i-- > 1;) {
    precision[i - 1] = std::max(precision[i - 1], precision[i]);
  }
  double sum = 0.0;
  for (int i = 0; i <= 100; ++i) {
    const double r = i / 100.0;
    const auto it = std::lower_bound(recall.begin(), recall.end(), r);
    if (it != recall.end()) sum += precision[static_cast<std::size_t>(it - recall.begin())];
  }
  return sum / 101.0;
}

EvalReport evaluate_ap(const std::vector<std::vector<Pose>>& preds,
                       const std::vector<std::vector<PersonAnnotation>>& gts,
                       std::span<const double> sigmas) {
  check_alignment(preds.size(), gts.size());
  EvalReport report;
  for (const auto& img : gts) {
    for (const auto& a : img) report.n_gt += a.labeled_count() > 0 ? 1 : 0;
  }
  for (const auto& img : preds) report.n_pred += static_cast<int>(img.size());
  double sum = 0.0;
  for (double t : coco_oks_thresholds()) {
    const double ap = average_precision(preds, gts, t, sigmas);
    report.ap_per_threshold.emplace_back(t, ap);
    sum += ap;
  }
  report.ap_mean = sum / static_cast<double>(report.ap_per_threshold.size());
  return report;
}

CenterErrorReport center_error_analysis(const std::vector<std::vector<Pose>>& preds,
                                        const std::vector<std::vector<PersonAnnotation>>& gts,
                                        const CenterErrorOptions& options) {
  check_alignment(preds.size(), gts.size());
  if (!(options.radius > 0.0) || !(options.bin_width > 0.0)) {
    throw Error(ErrorCode::kInvalidParam, "center radius and bin width must be > 0");
  }
  CenterErrorReport report;
  report.match_radius = options.radius;

  for (std::size_t img = 0; img < gts.size(); ++img) {
    std::vector<Point2> centers;
    for (const auto& a : gts[img]) {
      if (a.labeled_count() > 0) centers.push_back(labeled_centroid(a.keypoints));
    }
    report.n_gt += static_cast<int>(centers.size());
    const auto& ps = preds[img];
    auto dist = [&](std::size_t g, std::size_t p) {
      return std::hypot(ps[p].center.x - centers[g].x, ps[p].center.y - centers[g].y);
    };
    if (!options.one_to_one) {
      for (std::size_t g = 0; g < centers.size(); ++g) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t p = 0; p < ps.size(); ++p) best = std::min(best, dist(g, p));
        if (best < options.radius) report.errors.push_back(best);
      }
      continue;
    }
    std::vector<std::tuple<double, std::size_t, std::size_t>> pairs;
    for (std::size_t g = 0; g < centers.size(); ++g) {
      for (std::size_t p = 0; p < ps.size(); ++p) {
        const double d = dist(g, p);
        if (d < options.radius) pairs.emplace_back(d, g, p);
      }
    }
    std::stable_sort(pairs.begin(), pairs.end(),
                     [](const auto& a, const auto& b) { return std::get<0>(a) < std::get<0>(b); });
    std::vector<char> gt_used(centers.size(), 0), pred_used(ps.size(), 0);
    for (const auto& [d, g, p] : pairs) {
      if (gt_used[g] || pred_used[p]) continue;
      gt_used[g] = pred_used[p] = 1;
      report.errors.push_back(d);
    }
  }

  report.n_matched = static_cast<int>(report.errors.size());
  if (report.n_matched > 0) {
    const double n = report.n_matched;
    report.mean_error = std::accumulate(report.errors.begin(), report.errors.end(), 0.0) / n;
    double ss = 0.0;
    for (double e : report.errors) ss += (e - report.mean_error) * (e - report.mean_error);
    report.variance = ss / n;
  }

  const int bins = static_cast<int>(std::ceil(options.radius / options.bin_width));
  for (int i = 0; i <= bins; ++i) {
    report.histogram.edges.push_back(std::min(options.radius, i * options.bin_width));
  }
  report.histogram.counts.assign(bins, 0);
  for (double e : report.errors) {
    const int b = std::min(bins - 1, static_cast<int>(e / options.bin_width));
    ++report.histogram.counts[b];
  }
  return report;
}

}  // namespace lowpose
