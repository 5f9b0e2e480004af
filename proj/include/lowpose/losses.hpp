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

#include <numbers>
#include <vector>

#include "lowpose/core.hpp"

namespace lowpose {

struct LossWeights {
  double lambda_m = 0.03;
  double lambda_c = 0.001;
  double lambda_sup = 1.0;
  double lambda_unsup = 1.0;
  double smooth_l1_beta = 1.0;
  double tag_sigma = std::numbers::sqrt2 / 2.0;
  /// Whether the push term keeps its i == i' terms (each contributes 1/N^2).
  bool push_include_self = true;

  void validate() const;
  bool operator==(const LossWeights&) const = default;
};

/// 0.5 x^2 / beta inside |x| < beta, |x| - 0.5 beta outside.
double smooth_l1(double x, double beta);
double smooth_l1_derivative(double x, double beta);

// Kernels are instantiated for float and double tensors. When `grad` is
// non-null it receives d(loss)/d(pred) with the prediction's shape.

/// (1 / C) * sum over channels and pixels of (W * (H - H_hat))^2 with C the
/// channel count: K + 1 for the center-based heatmaps, K for keypoint-only.
template <class T>
double heatmap_loss(const Tensor3<T>& pred, const Tensor3<T>& gt, const Tensor3<T>& weight,
                    Tensor3<double>* grad = nullptr);

/// Sum over persons of (1 / sqrt(h^2 + w^2)) times the smooth-L1 residual
/// summed over the person's supervised pixels and labeled keypoint channels.
template <class T>
double offset_loss(const Tensor3<T>& pred, const Tensor3<T>& gt,
                   const std::vector<OffsetSupervision>& persons, double beta,
                   Tensor3<double>* grad = nullptr);

/// Same quantity expressed through a dense weight map (as written by
/// encode_targets): sum of weight * smooth-L1(pred - gt).
template <class T>
double offset_loss_weighted(const Tensor3<T>& pred, const Tensor3<T>& gt, const Tensor3<T>& weight,
                            double beta, Tensor3<double>* grad = nullptr);

struct TagLossTerms {
  double pull = 0.0;
  double push = 0.0;
  double total() const { return pull + push; }
};

/// Associative-embedding pull/push loss. Persons with no indices are
/// ignored; kEmptyPersons if none remain.
template <class T>
TagLossTerms tag_loss(const Tensor3<T>& tags, const std::vector<std::vector<TagIndex>>& persons,
                      double sigma, bool include_self = true, Tensor3<double>* grad = nullptr);

/// L_H + lambda_m * L_O.
double main_supervised_loss(double heatmap_term, double offset_term, const LossWeights& w);
/// L_H + lambda_c * L_tag.
double comp_supervised_loss(double heatmap_term, double tag_term, const LossWeights& w);
/// lambda_sup * L_sup + lambda_unsup * L_unsup.
double student_loss(double supervised, double unsupervised, const LossWeights& w);

struct MainLossBreakdown {
  double heatmap = 0.0;
  double offset = 0.0;
  double total = 0.0;
};

/// Full center-based loss of a prediction against encoded targets. Used for
/// both the supervised branch and, on pseudo-label targets, the
/// unsupervised one.
MainLossBreakdown main_loss(const Tensor3f& pred_heatmaps, const Tensor3f& pred_offsets,
                            const TargetMaps& targets, const LossWeights& w);

}  // namespace lowpose
