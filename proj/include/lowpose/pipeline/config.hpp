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

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "lowpose/augment.hpp"
#include "lowpose/codec.hpp"
#include "lowpose/eval.hpp"
#include "lowpose/fusion.hpp"
#include "lowpose/losses.hpp"
#include "lowpose/schema.hpp"

namespace lowpose {

/// Every tunable of the toolkit. Text form: one `section.key = value` per
/// line, `#` starts a comment, ranges and lists are comma separated.
struct PipelineConfig {
  int keypoints = kDefaultKeypointCount;
  std::uint64_t seed = 0;
  /// As written; resolved against base_dir. Empty selects the built-in
  /// schema for `keypoints`.
  std::string schema_path;
  std::filesystem::path base_dir;

  EllaParams ella;
  /// Its `ella` member mirrors `ella` above.
  AdjustedEllaParams adjusted_ella;
  PdaParams pda;
  AffineParams affine;
  /// Its keypoint_count mirrors `keypoints`.
  CodecConfig codec;
  LossWeights losses;
  /// Empty kpt_sigmas means the schema's.
  FusionConfig fusion;
  CenterErrorOptions center_error;
  std::vector<double> stats_oks_thresholds{0.3, 0.5, 0.7, 0.9};
  double stats_overlap_threshold = 0.5;

  /// Throws kConfigError naming the offending section.
  void validate() const;

  /// Fusion sigmas if given, else the schema's.
  std::vector<double> kpt_sigmas(const KeypointSchema& schema) const;

  bool operator==(const PipelineConfig&) const = default;
};

/// Unknown, duplicate or malformed keys are kConfigError with the line number.
/// `base_dir` is stored for resolving relative paths.
PipelineConfig parse_config(std::string_view text, const std::filesystem::path& base_dir = {});
PipelineConfig load_config(const std::filesystem::path& path);

/// Writes every key; doubles use their shortest exact form.
std::string serialize_config(const PipelineConfig& cfg);

/// JSON `{"names": [...], "flip_pairs": [[a, b], ...], "oks_sigmas": [...]}`.
KeypointSchema parse_schema(std::string_view json_text);
KeypointSchema load_schema(const std::filesystem::path& path);

/// The schema file named by the config, or the built-in one; its size must
/// equal cfg.keypoints.
KeypointSchema resolve_schema(const PipelineConfig& cfg);

}  // namespace lowpose
