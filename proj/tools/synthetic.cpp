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

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numbers>

#include "commands.hpp"
#include "lowpose/pipeline/annotations.hpp"
#include "lowpose/pipeline/config.hpp"
#include "lowpose/pipeline/image_io.hpp"
#include "lowpose/pipeline/tensor_container.hpp"
#include "lowpose/rng.hpp"
#include "usage_error.hpp"
#include "worker_pool.hpp"

namespace lowpose::cli {

namespace fs = std::filesystem;

namespace {

// Upright stick figure in units of person height, CrowdPose order.
constexpr double kTemplate14[14][2] = {
    {0.12, -0.30}, {-0.12, -0.30}, {0.18, -0.12}, {-0.18, -0.12}, {0.20, 0.02},
    {-0.20, 0.02}, {0.08, 0.05},   {-0.08, 0.05}, {0.09, 0.25},   {-0.09, 0.25},
    {0.09, 0.45},  {-0.09, 0.45},  {0.0, -0.45},  {0.0, -0.36}};

Point2 template_point(int i, int k) {
  if (k == 14) return {kTemplate14[i][0], kTemplate14[i][1]};
  const double a = 2.0 * std::numbers::pi * i / k;
  return {0.2 * std::cos(a), 0.45 * std::sin(a)};
}

PersonAnnotation make_person(double cx, double cy, double height, int k, Rng& rng) {
  PersonAnnotation a;
  a.keypoints.resize(k);
  for (int i = 0; i < k; ++i) {
    const Point2 t = template_point(i, k);
    auto& kp = a.keypoints[i];
    const double r = rng.uniform(0.0, 1.0);
    kp.v = r < 0.05 ? 0 : (r < 0.15 ? 1 : 2);
    if (kp.v > 0) {
      kp.x = static_cast<float>(cx + height * (t.x + rng.uniform(-0.02, 0.02)));
      kp.y = static_cast<float>(cy + height * (t.y + rng.uniform(-0.02, 0.02)));
    }
  }
  if (a.labeled_count() == 0) {
    a.keypoints[0] = {static_cast<float>(cx + height * template_point(0, k).x),
                      static_cast<float>(cy + height * template_point(0, k).y), 2, 1.0f};
  }
  a.bbox = pose_bbox(a.to_pose(), 0.1);
  a.area = std::max(1.0, a.bbox.area());
  return a;
}

Image render(const std::vector<PersonAnnotation>& people, int w, int h, Rng& rng) {
  Image img(w, h, 3);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const float v = static_cast<float>(60.0 + rng.normal(8.0));
      for (int c = 0; c < 3; ++c) img.at(x, y, c) = v;
    }
  }
  for (const auto& p : people) {
    for (const auto& kp : p.keypoints) {
      if (!kp.labeled()) continue;
      for (int dy = -3; dy <= 3; ++dy) {
        for (int dx = -3; dx <= 3; ++dx) {
          const int x = static_cast<int>(std::lround(kp.x)) + dx;
          const int y = static_cast<int>(std::lround(kp.y)) + dy;
          if (dx * dx + dy * dy > 9 || x < 0 || y < 0 || x >= w || y >= h) continue;
          for (int c = 0; c < 3; ++c) img.at(x, y, c) = 220.0f;
        }
      }
    }
  }
  img.clamp();
  return img;
}

}  // namespace

int run_synth(const Common& c, const SynthOptions& o) {
  const PipelineConfig cfg = c.config.empty() ? PipelineConfig{} : load_config(c.config);
  const KeypointSchema schema = resolve_schema(cfg);
  if (o.images < 1 || o.width < 32 || o.height < 32 || o.min_people < 0 ||
      o.max_people < o.min_people) {
    throw UsageError("synth: need images >= 1, sizes >= 32 and 0 <= min-people <= max-people");
  }
  const int k = cfg.keypoints;
  Rng rng(o.seed.value_or(cfg.seed));
  AnnotationSet set;
  set.keypoint_names = schema.names;
  std::vector<Image> images;
  std::int64_t next_ann = 1;
  for (int i = 0; i < o.images; ++i) {
    ImageInfo info{i + 1, std::to_string(i + 1) + ".png", o.width, o.height};
    const int want = rng.uniform_int(o.min_people, o.max_people);
    std::vector<PersonAnnotation> people;
    std::vector<std::array<double, 3>> placed;  // cx, cy, height
    for (int attempt = 0; attempt < 200 && static_cast<int>(people.size()) < want; ++attempt) {
      const double height = rng.uniform(0.3, 0.45) * std::min(o.width, o.height);
      const double cx = rng.uniform(0.25 * height + 4, o.width - 0.25 * height - 4);
      const double cy = rng.uniform(0.5 * height + 4, o.height - 0.5 * height - 4);
      const bool clear = std::all_of(placed.begin(), placed.end(), [&](const auto& q) {
        return std::hypot(cx - q[0], cy - q[1]) >= 0.5 * (height + q[2]);
      });
      if (!clear) continue;
      placed.push_back({cx, cy, height});
      PersonAnnotation a = make_person(cx, cy, height, k, rng);
      a.id = next_ann++;
      a.image_id = info.id;
      people.push_back(std::move(a));
    }
    images.push_back(render(people, o.width, o.height, rng));
    set.images.push_back(std::move(info));
    for (auto& p : people) set.annotations.push_back(std::move(p));
  }
  const fs::path out(o.out_dir);
  std::error_code ec;
  fs::create_directories(out / "images", ec);
  if (ec) throw Error(ErrorCode::kIoError, "cannot create " + (out / "images").string());
  for (std::size_t i = 0; i < images.size(); ++i) {
    write_image(out / "images" / set.images[i].file_name, images[i]);
  }
  save_annotations(out / "annotations.json", set);
  spdlog::info("synth: {} images, {} people", set.images.size(), set.annotations.size());
  return 0;
}

int run_simulate(const Common& c, const SimulateOptions& o) {
  const PipelineConfig cfg = c.config.empty() ? PipelineConfig{} : load_config(c.config);
  const int k = cfg.keypoints;
  const std::uint64_t seed = o.seed.value_or(cfg.seed);
  const int jobs = c.jobs > 0 ? c.jobs : default_jobs();
  std::vector<fs::path> files;
  std::error_code ec;
  if (!fs::is_directory(o.tensors_dir, ec)) {
    throw Error(ErrorCode::kIoError, o.tensors_dir + " is not a directory");
  }
  for (const auto& e : fs::directory_iterator(o.tensors_dir)) {
    if (e.is_regular_file() && e.path().extension() == ".lptc") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  fs::create_directories(o.out_dir, ec);
  if (ec) throw Error(ErrorCode::kIoError, "cannot create " + o.out_dir);

  parallel_for(files.size(), jobs, [&](std::size_t i) {
    const std::string name = files[i].filename().string();
    const TensorContainer gt = read_tensor_container(files[i]);
    Rng rng(mix_seed(seed, hash_name(name)));
    Tensor3f hm = find_tensor(gt, "heatmaps").to_tensor3();
    Tensor3f off = find_tensor(gt, "offsets").to_tensor3();
    const NamedTensor& idx = find_tensor(gt, "tag_indices");
    if (hm.channels != k + 1 || idx.shape.size() != 2 || idx.shape[1] != static_cast<std::uint32_t>(k)) {
      throw Error(ErrorCode::kShapeMismatch, files[i].string() + ": unexpected tensor shapes");
    }
    // Multiplicative jitter keeps the zero background free of spurious peaks.
    for (float& v : hm.data) {
      v = std::clamp(static_cast<float>(v * (1.0 + rng.normal(o.heatmap_noise))), 0.0f, 1.0f);
    }
    for (float& v : off.data) v = static_cast<float>(v + rng.normal(o.offset_noise));
    Tensor3f tags(k, hm.height, hm.width);
    const auto pix = idx.to_floats();
    for (std::uint32_t n = 0; n < idx.shape[0]; ++n) {
      for (int j = 0; j < k; ++j) {
        const float p = pix[n * k + j];
        if (p < 0.0f) continue;
        const float t = static_cast<float>(2.0 * n + rng.normal(o.tag_noise));
        const int px = static_cast<int>(p) % hm.width;
        const int py = static_cast<int>(p) / hm.width;
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            const int x = px + dx, y = py + dy;
            if (x >= 0 && y >= 0 && x < hm.width && y < hm.height) tags.at(j, y, x) = t;
          }
        }
      }
    }
    write_tensor_container(fs::path(o.out_dir) / name,
                           {NamedTensor::from_tensor("heatmaps", hm),
                            NamedTensor::from_tensor("offsets", off),
                            NamedTensor::from_tensor("tags", tags)});
  });
  spdlog::info("simulate: {} prediction containers written to {}", files.size(), o.out_dir);
  return 0;
}

}  // namespace lowpose::cli
