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
#include <optional>
#include <string>

namespace lowpose::cli {

struct Common {
  std::string config;
  int jobs = 0;  // 0: one per logical core
};

struct AugmentOptions {
  std::string mode;  // ella | adjusted-ella | pda
  std::optional<std::uint64_t> seed;
  std::string in_dir;
  std::string out_dir;
  std::string poses;
  std::string annotations;  // optional file_name -> image_id mapping for pda
};

struct EncodeOptions {
  std::string annotations;
  std::string out_dir;
};

struct DecodeOptions {
  std::string mode;  // center | keypoint
  std::string tensors_dir;
  std::string out;
  std::string coco_results;
};

struct FuseOptions {
  std::string main;
  std::string comp;
  std::string out;
  std::string coco_results;
};

struct EvaluateOptions {
  std::string pred;
  std::string gt;
  std::string report;
};

struct StatsOptions {
  std::string mode;  // pseudo-labels | center-error
  std::string main;
  std::string comp;
  std::string pred;
  std::string gt;
  std::string report;
};

struct LossOptions {
  std::string pred;
  std::string gt;
};

struct SynthOptions {
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  int images = 4;
  int min_people = 1;
  int max_people = 4;
  int width = 256;
  int height = 256;
};

struct SimulateOptions {
  std::string tensors_dir;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  double heatmap_noise = 0.01;
  double offset_noise = 0.05;
  double tag_noise = 0.05;
};

int run_augment(const Common& c, const AugmentOptions& o);
int run_encode(const Common& c, const EncodeOptions& o);
int run_decode(const Common& c, const DecodeOptions& o);
int run_fuse(const Common& c, const FuseOptions& o);
int run_evaluate(const Common& c, const EvaluateOptions& o);
int run_stats(const Common& c, const StatsOptions& o);
int run_loss(const Common& c, const LossOptions& o);
int run_synth(const Common& c, const SynthOptions& o);
int run_simulate(const Common& c, const SimulateOptions& o);
int run_config_dump(const Common& c);

}  // namespace lowpose::cli
