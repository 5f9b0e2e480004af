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

#include "lowpose/losses.hpp"

#include <cmath>
#include <string>

namespace lowpose {

void LossWeights::validate() const {
  auto nonneg = [](double v) { return std::isfinite(v) && v >= 0.0; };
  if (!nonneg(lambda_m) || !nonneg(lambda_c) || !nonneg(lambda_sup) || !nonneg(lambda_unsup)) {
    throw Error(ErrorCode::kInvalidParam, "loss weights must be finite and >= 0");
  }
  if (!(std::isfinite(smooth_l1_beta) && smooth_l1_beta > 0.0)) {
    throw Error(ErrorCode::kInvalidParam, "smooth_l1_beta must be > 0");
  }
  if (!(std::isfinite(tag_sigma) && tag_sigma > 0.0)) {
    throw Error(ErrorCode::kInvalidParam, "tag_sigma must be > 0");
  }
}

double smooth_l1(double x, double beta) {
  const double a = std::abs(x);
  return a < beta ? 0.5 * x * x / beta : a - 0.5 * beta;
}

double smooth_l1_derivative(double x, double beta) {
  if (std::abs(x) < beta) return x / beta;
  return x > 0 ? 1.0 : -1.0;
}

namespace {

template <class T>
void prepare_grad(const Tensor3<T>& like, Tensor3<double>* grad) {
  if (grad) *grad = Tensor3<double>(like.channels, like.height, like.width, 0.0);
}

template <class T>
void require_same(const Tensor3<T>& a, const Tensor3<T>& b, const char* what) {
  if (!a.same_shape(b)) throw Error(ErrorCode::kShapeMismatch, what);
}

}  // namespace

template <class T>
double heatmap_loss(const Tensor3<T>& pred, const Tensor3<T>& gt, const Tensor3<T>& weight,
                    Tensor3<double>* grad) {
  require_same(pred, gt, "heatmap prediction and target differ in shape");
  require_same(pred, weight, "heatmap weight differs in shape");
  if (pred.channels < 1) throw Error(ErrorCode::kShapeMismatch, "heatmaps need >= 1 channel");
  prepare_grad(pred, grad);
  const double inv_c = 1.0 / pred.channels;
  double sum = 0.0;
  for (std::size_t i = 0; i < pred.data.size(); ++i) {
    const double w = weight.data[i];
    const double r = w * (double(gt.data[i]) - double(pred.data[i]));
    sum += r * r;
    if (grad) grad->data[i] = -2.0 * w * r * inv_c;
  }
  return sum * inv_c;
}

template <class T>
double offset_loss(const Tensor3<T>& pred, const Tensor3<T>& gt,
                   const std::vector<OffsetSupervision>& persons, double beta,
                   Tensor3<double>* grad) {
  require_same(pred, gt, "offset prediction and target differ in shape");
  if (pred.channels % 2 != 0) throw Error(ErrorCode::kShapeMismatch, "offsets need 2K channels");
  prepare_grad(pred, grad);
  const int k = pred.channels / 2;
  const int plane = static_cast<int>(pred.plane());
  double total = 0.0;
  for (std::size_t i = 0; i < persons.size(); ++i) {
    const auto& person = persons[i];
    const double diag = person.bbox.diagonal();
    if (!(diag > 0.0)) {
      throw Error(ErrorCode::kZeroDiagonal, "person " + std::to_string(i) + " has a zero-size bbox");
    }
    const double scale = 1.0 / diag;
    double sum = 0.0;
    for (int px : person.pixels) {
      if (px < 0 || px >= plane) throw Error(ErrorCode::kShapeMismatch, "offset pixel out of range");
      for (int j : person.keypoints) {
        if (j < 0 || j >= k) throw Error(ErrorCode::kShapeMismatch, "offset keypoint out of range");
        for (int ch = 2 * j; ch <= 2 * j + 1; ++ch) {
          const std::size_t idx = static_cast<std::size_t>(ch) * plane + px;
          const double d = double(pred.data[idx]) - double(gt.data[idx]);
          sum += smooth_l1(d, beta);
          if (grad) grad->data[idx] += scale * smooth_l1_derivative(d, beta);
        }
      }
    }
    total += scale * sum;
  }
  return total;
}

template <class T>
double offset_loss_weighted(const Tensor3<T>& pred, const Tensor3<T>& gt, const Tensor3<T>& weight,
                            double beta, Tensor3<double>* grad) {
  require_same(pred, gt, "offset prediction and target differ in shape");
  require_same(pred, weight, "offset weight differs in shape");
  prepare_grad(pred, grad);
  double total = 0.0;
  for (std::size_t i = 0; i < pred.data.size(); ++i) {
    const double w = weight.data[i];
    if (w == 0.0) continue;
    const double d = double(pred.data[i]) - double(gt.data[i]);
    total += w * smooth_l1(d, beta);
    if (grad) grad->data[i] = w * smooth_l1_derivative(d, beta);
  }
  return total;
}

template <class T>
TagLossTerms tag_loss(const Tensor3<T>& tags, const std::vector<std::vector<TagIndex>>& persons,
                      double sigma, bool include_self, Tensor3<double>* grad) {
  if (!(std::isfinite(sigma) && sigma > 0.0)) {
    throw Error(ErrorCode::kInvalidParam, "tag sigma must be > 0");
  }
  prepare_grad(tags, grad);
  const int plane = static_cast<int>(tags.plane());
  std::vector<const std::vector<TagIndex>*> people;
  for (const auto& p : persons) {
    if (!p.empty()) people.push_back(&p);
  }
  if (people.empty()) throw Error(ErrorCode::kEmptyPersons, "tag loss needs at least one person");
  const int n = static_cast<int>(people.size());

  auto flat = [&](const TagIndex& t) {
    if (t.keypoint < 0 || t.keypoint >= tags.channels || t.pixel < 0 || t.pixel >= plane) {
      throw Error(ErrorCode::kShapeMismatch, "tag index out of range");
    }
    return static_cast<std::size_t>(t.keypoint) * plane + t.pixel;
  };

  std::vector<double> mean(n, 0.0);
  for (int i = 0; i < n; ++i) {
    for (const auto& t : *people[i]) mean[i] += tags.data[flat(t)];
    mean[i] /= static_cast<double>(people[i]->size());
  }

  TagLossTerms out;
  for (int i = 0; i < n; ++i) {
    for (const auto& t : *people[i]) {
      const std::size_t idx = flat(t);
      const double d = mean[i] - tags.data[idx];
      out.pull += d * d;
      // The mean's own dependence cancels because residuals sum to zero.
      if (grad) grad->data[idx] += 2.0 * (tags.data[idx] - mean[i]) / n;
    }
  }
  out.pull /= n;

  const double inv_2s2 = 1.0 / (2.0 * sigma * sigma);
  const double inv_n2 = 1.0 / (double(n) * n);
  std::vector<double> dmean(n, 0.0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j && !include_self) continue;
      const double diff = mean[i] - mean[j];
      const double e = std::exp(-diff * diff * inv_2s2);
      out.push += e;
      dmean[i] += -2.0 * diff * inv_2s2 * e;
      dmean[j] += 2.0 * diff * inv_2s2 * e;
    }
  }
  out.push *= inv_n2;
  if (grad) {
    for (int i = 0; i < n; ++i) {
      const double g = dmean[i] * inv_n2 / static_cast<double>(people[i]->size());
      for (const auto& t : *people[i]) grad->data[flat(t)] += g;
    }
  }
  return out;
}

#define LOWPOSE_INSTANTIATE(T)                                                                  \
  template double heatmap_loss<T>(const Tensor3<T>&, const Tensor3<T>&, const Tensor3<T>&,      \
                                  Tensor3<double>*);                                            \
  template double offset_loss<T>(const Tensor3<T>&, const Tensor3<T>&,                          \
                                 const std::vector<OffsetSupervision>&, double,                 \
                                 Tensor3<double>*);                                             \
  template double offset_loss_weighted<T>(const Tensor3<T>&, const Tensor3<T>&,                 \
                                          const Tensor3<T>&, double, Tensor3<double>*);         \
  template TagLossTerms tag_loss<T>(const Tensor3<T>&, const std::vector<std::vector<TagIndex>>&, \
                                    double, bool, Tensor3<double>*);

LOWPOSE_INSTANTIATE(float)
LOWPOSE_INSTANTIATE(double)
#undef LOWPOSE_INSTANTIATE

double main_supervised_loss(double heatmap_term, double offset_term, const LossWeights& w) {
  return heatmap_term + w.lambda_m * offset_term;
}

double comp_supervised_loss(double heatmap_term, double tag_term, const LossWeights& w) {
  return heatmap_term + w.lambda_c * tag_term;
}

double student_loss(double supervised, double unsupervised, const LossWeights& w) {
  return w.lambda_sup * supervised + w.lambda_unsup * unsupervised;
}

MainLossBreakdown main_loss(const Tensor3f& pred_heatmaps, const Tensor3f& pred_offsets,
                            const TargetMaps& targets, const LossWeights& w) {
  w.validate();
  targets.validate();
  MainLossBreakdown b;
  b.heatmap = heatmap_loss(pred_heatmaps, targets.heatmaps, targets.heatmap_weight);
  b.offset = offset_loss_weighted(pred_offsets, targets.offsets, targets.offset_weight,
                                  w.smooth_l1_beta);
  b.total = main_supervised_loss(b.heatmap, b.offset, w);
  return b;
}

}  // namespace lowpose
