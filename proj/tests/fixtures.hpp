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

// Random document generators and byte mutators shared by the unit tests and
// the acceptance binary.

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "lowpose/pipeline/annotations.hpp"
#include "lowpose/pipeline/poses_json.hpp"
#include "lowpose/pipeline/tensor_container.hpp"

namespace lowpose::testing {

inline TensorContainer random_container(std::mt19937_64& gen) {
  std::uniform_int_distribution<int> count(0, 4), rank(0, 3), dim(0, 5), byte(0, 255);
  std::uniform_real_distribution<float> val(-100.0f, 100.0f);
  TensorContainer out;
  const int n = count(gen);
  for (int i = 0; i < n; ++i) {
    NamedTensor t;
    t.name = "t" + std::to_string(i) + (i % 2 ? "\xc3\xa9" : "");
    t.dtype = byte(gen) % 2 ? DType::kFloat32 : DType::kUInt8;
    t.shape.resize(rank(gen));
    std::uint64_t elems = 1;
    for (auto& d : t.shape) {
      d = static_cast<std::uint32_t>(dim(gen));
      elems *= d;
    }
    if (t.dtype == DType::kFloat32) {
      std::vector<float> v(elems);
      for (auto& x : v) x = val(gen);
      t = NamedTensor::from_floats(t.name, t.shape, v);
    } else {
      t.payload.resize(elems);
      for (auto& b : t.payload) b = static_cast<std::uint8_t>(byte(gen));
    }
    out.push_back(std::move(t));
  }
  return out;
}

inline AnnotationSet random_annotations(std::mt19937_64& gen, int k = 14) {
  std::uniform_int_distribution<int> count(1, 3), people(0, 3), vis(0, 2);
  std::uniform_real_distribution<double> coord(0, 640);
  AnnotationSet set;
  for (int i = 0; i < k; ++i) set.keypoint_names.push_back("kp" + std::to_string(i));
  const int n_img = count(gen);
  std::int64_t ann_id = 100;
  for (int i = 0; i < n_img; ++i) {
    ImageInfo info{i + 1, "img_" + std::to_string(i) + ".png", 640, 480};
    set.images.push_back(info);
    const int n = people(gen);
    for (int p = 0; p < n; ++p) {
      PersonAnnotation a;
      a.id = ann_id++;
      a.image_id = info.id;
      for (int j = 0; j < k; ++j) {
        const int v = vis(gen);
        a.keypoints.push_back(
            {v ? float(coord(gen)) : 0.0f, v ? float(coord(gen)) : 0.0f, v, 1.0f});
      }
      a.bbox = {float(coord(gen)), float(coord(gen)), float(coord(gen) / 4), float(coord(gen) / 4)};
      a.area = float(a.bbox.w * a.bbox.h);
      set.annotations.push_back(std::move(a));
    }
  }
  return set;
}

/// One 320x240 image with three well separated 14-keypoint people. The
/// main teacher finds the first two at 0.95 and 0.93; the complementary
/// teacher finds all three at 0.7.
struct DualTeacherScene {
  AnnotationSet gt;
  PoseFile main;
  PoseFile comp;
};

inline DualTeacherScene dual_teacher_scene() {
  DualTeacherScene s;
  for (int i = 0; i < 14; ++i) s.gt.keypoint_names.push_back("kp" + std::to_string(i));
  s.gt.images.push_back({1, "scene.png", 320, 240});
  s.main.keypoint_count = s.comp.keypoint_count = 14;
  s.main.images.push_back({1, "scene.png", {}});
  s.comp.images.push_back({1, "scene.png", {}});
  for (int p = 0; p < 3; ++p) {
    PersonAnnotation a;
    a.id = p + 1;
    a.image_id = 1;
    const double x0 = 30.0 + 100.0 * p;
    for (int j = 0; j < 14; ++j) {
      a.keypoints.push_back({float(x0 + 8.0 * (j % 4)), float(40.0 + 12.0 * (j / 4)), 2, 1.0f});
    }
    a.bbox = {x0, 40.0, 24.0, 36.0};
    a.area = 24.0 * 36.0;
    s.gt.annotations.push_back(a);
    auto pose = a.to_pose();
    pose.source = PoseSource::kComplementary;
    pose.score = 0.7f;
    s.comp.images[0].poses.push_back(pose);
    if (p < 2) {
      pose.source = PoseSource::kMain;
      pose.score = p == 0 ? 0.95f : 0.93f;
      s.main.images[0].poses.push_back(pose);
    }
  }
  return s;
}

/// Flips, inserts, deletes or truncates a few bytes.
inline std::string mutate(std::string s, std::mt19937_64& gen) {
  std::uniform_int_distribution<int> op(0, 3), byte(0, 255), edits(1, 4);
  const int n = edits(gen);
  for (int e = 0; e < n; ++e) {
    const std::size_t size = s.size();
    std::uniform_int_distribution<std::size_t> pos(0, size == 0 ? 0 : size - 1);
    switch (op(gen)) {
      case 0:
        if (size) s[pos(gen)] = static_cast<char>(byte(gen));
        break;
      case 1:
        s.insert(s.begin() + static_cast<std::ptrdiff_t>(size ? pos(gen) : 0), static_cast<char>(byte(gen)));
        break;
      case 2:
        if (size) s.erase(pos(gen), 1);
        break;
      default:
        if (size) s.resize(pos(gen));
        break;
    }
  }
  return s;
}

inline std::vector<std::uint8_t> mutate(const std::vector<std::uint8_t>& bytes, std::mt19937_64& gen) {
  const auto s = mutate(std::string(bytes.begin(), bytes.end()), gen);
  return {s.begin(), s.end()};
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("lowpose_" + tag + "_" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const noexcept { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace lowpose::testing
