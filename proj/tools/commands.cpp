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

#include "commands.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <map>
#include <set>

#include <json.hpp>

#include "lowpose/augment.hpp"
#include "lowpose/codec.hpp"
#include "lowpose/eval.hpp"
#include "lowpose/fusion.hpp"
#include "lowpose/losses.hpp"
#include "lowpose/pipeline/annotations.hpp"
#include "lowpose/pipeline/config.hpp"
#include "lowpose/pipeline/file_util.hpp"
#include "lowpose/pipeline/image_io.hpp"
#include "lowpose/pipeline/poses_json.hpp"
#include "lowpose/pipeline/reports.hpp"
#include "lowpose/pipeline/tensor_container.hpp"
#include "lowpose/rng.hpp"
#include "usage_error.hpp"
#include "worker_pool.hpp"

namespace lowpose::cli {

namespace fs = std::filesystem;
using Json = nlohmann::json;

namespace {

struct Setup {
  PipelineConfig cfg;
  KeypointSchema schema;
  int jobs = 1;
};

Setup setup(const Common& c) {
  Setup s;
  s.cfg = c.config.empty() ? PipelineConfig{} : load_config(c.config);
  if (c.config.empty()) s.cfg.validate();
  s.schema = resolve_schema(s.cfg);
  s.jobs = c.jobs > 0 ? c.jobs : default_jobs();
  return s;
}

std::vector<double> sigmas(const Setup& s) { return s.cfg.kpt_sigmas(s.schema); }

/// Regular files under `dir` accepted by `keep`, sorted by file name.
template <class Pred>
std::vector<fs::path> list_files(const fs::path& dir, Pred keep) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) {
    throw Error(ErrorCode::kIoError, dir.string() + " is not a directory");
  }
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && keep(e.path())) out.push_back(e.path());
  }
  std::sort(out.begin(), out.end(),
            [](const fs::path& a, const fs::path& b) { return a.filename() < b.filename(); });
  return out;
}

std::optional<std::int64_t> parse_id(const std::string& s) {
  std::int64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

std::int64_t image_id_of(const fs::path& file) {
  if (auto id = parse_id(file.stem().string())) return *id;
  throw Error(ErrorCode::kSchemaError, file.string() + ": file stem is not an image id");
}

/// Tensor containers named <image_id>.lptc, in image-id order.
std::vector<std::pair<std::int64_t, fs::path>> list_containers(const fs::path& dir) {
  std::vector<std::pair<std::int64_t, fs::path>> out;
  for (const auto& p : list_files(dir, [](const fs::path& p) { return p.extension() == ".lptc"; })) {
    out.emplace_back(image_id_of(p), p);
  }
  std::sort(out.begin(), out.end());
  return out;
}

void make_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kIoError, "cannot create " + dir.string() + ": " + ec.message());
}

Tensor3f first_channels(const Tensor3f& t, int k) {
  Tensor3f out(k, t.height, t.width);
  std::copy_n(t.data.begin(), out.data.size(), out.data.begin());
  return out;
}

/// Heatmaps of a keypoint-based model: K planes, or K + 1 when the tensor
/// also carries the center channel.
Tensor3f keypoint_planes(const Tensor3f& heatmaps, int k, const std::string& where) {
  if (heatmaps.channels == k) return heatmaps;
  if (heatmaps.channels == k + 1) return first_channels(heatmaps, k);
  throw Error(ErrorCode::kShapeMismatch, where + ": heatmaps have " +
                                             std::to_string(heatmaps.channels) +
                                             " channels, expected " + std::to_string(k) + " or " +
                                             std::to_string(k + 1));
}

void scale_poses(std::vector<Pose>& poses, double s) {
  for (auto& p : poses) {
    for (auto& kp : p.keypoints) {
      kp.x = static_cast<float>(kp.x * s);
      kp.y = static_cast<float>(kp.y * s);
    }
    p.center = {p.center.x * s, p.center.y * s};
  }
}

void write_json(const fs::path& path, const Json& j) { write_file_atomic(path, j.dump(1) + "\n"); }

std::vector<std::vector<TagIndex>> tag_persons(const NamedTensor& t, int k) {
  if (t.shape.size() != 2 || t.shape[1] != static_cast<std::uint32_t>(k)) {
    throw Error(ErrorCode::kShapeMismatch, "tag_indices must have shape (N, K)");
  }
  const auto v = t.to_floats();
  std::vector<std::vector<TagIndex>> persons(t.shape[0]);
  for (std::size_t n = 0; n < persons.size(); ++n) {
    for (int j = 0; j < k; ++j) {
      const float p = v[n * k + j];
      if (p >= 0.0f) persons[n].push_back({j, static_cast<int>(p)});
    }
  }
  return persons;
}

}  // namespace

int run_augment(const Common& c, const AugmentOptions& o) {
  const Setup s = setup(c);
  const std::uint64_t seed = o.seed.value_or(s.cfg.seed);
  const bool is_pda = o.mode == "pda";
  if (is_pda && o.poses.empty()) throw UsageError("augment pda requires --poses");

  PoseFile poses;
  std::map<std::string, const ImagePoses*> by_name;
  if (is_pda) {
    poses = load_poses(o.poses, s.cfg.keypoints);
    for (const auto& im : poses.images) {
      if (!im.file_name.empty()) by_name.emplace(im.file_name, &im);
    }
    if (!o.annotations.empty()) {
      for (const auto& info : load_annotations(o.annotations, s.cfg.keypoints).images) {
        if (const ImagePoses* im = poses.find(info.id)) by_name.emplace(info.file_name, im);
      }
    }
  }

  const auto files = list_files(o.in_dir, [](const fs::path& p) { return is_image_path(p); });
  make_dir(o.out_dir);
  std::vector<std::vector<BoundingBox>> patches(files.size());
  parallel_for(files.size(), s.jobs, [&](std::size_t i) {
    const std::string name = files[i].filename().string();
    const Image img = read_image(files[i]);
    Rng rng(mix_seed(seed, hash_name(name)));
    Image out;
    if (o.mode == "ella") {
      out = ella(img, s.cfg.ella, rng);
    } else if (o.mode == "adjusted-ella") {
      auto r = adjust_ella(img, s.cfg.adjusted_ella, rng);
      out = std::move(r.image);
      patches[i] = std::move(r.restored_patches);
    } else {
      const ImagePoses* match = nullptr;
      if (auto it = by_name.find(name); it != by_name.end()) {
        match = it->second;
      } else if (auto id = parse_id(files[i].stem().string())) {
        match = poses.find(*id);
      }
      if (!match) spdlog::warn("{}: no pseudo labels, image left unchanged", name);
      out = pda(img, match ? match->poses : std::vector<Pose>{}, s.cfg.pda, rng);
    }
    write_image(fs::path(o.out_dir) / name, out);
    spdlog::debug("augmented {}", name);
  });

  if (o.mode == "adjusted-ella") {
    Json arr = Json::array();
    for (std::size_t i = 0; i < files.size(); ++i) {
      Json boxes = Json::array();
      for (const auto& b : patches[i]) boxes.push_back({b.x, b.y, b.w, b.h});
      arr.push_back({{"file_name", files[i].filename().string()}, {"patches", std::move(boxes)}});
    }
    write_json(fs::path(o.out_dir) / "patches.json", {{"images", std::move(arr)}});
  }
  spdlog::info("augment {}: {} images written to {}", o.mode, files.size(), o.out_dir);
  return 0;
}

int run_encode(const Common& c, const EncodeOptions& o) {
  const Setup s = setup(c);
  const AnnotationSet set = load_annotations(o.annotations, s.cfg.keypoints);
  const auto per = set.per_image();
  const int k = s.cfg.keypoints;
  make_dir(o.out_dir);
  parallel_for(set.images.size(), s.jobs, [&](std::size_t i) {
    const ImageInfo& im = set.images[i];
    const int mw = map_extent(im.width, s.cfg.codec);
    const int mh = map_extent(im.height, s.cfg.codec);
    const auto anns = to_map_space(per[i], s.cfg.codec);
    const TargetMaps t = encode_targets(anns, s.cfg.codec, mw, mh);
    const auto tags = encode_tag_targets(anns, s.cfg.codec, mw, mh);
    std::vector<float> idx(tags.size() * k, -1.0f);
    for (std::size_t n = 0; n < tags.size(); ++n) {
      for (const auto& ti : tags[n]) idx[n * k + ti.keypoint] = static_cast<float>(ti.pixel);
    }
    TensorContainer out = {
        NamedTensor::from_tensor("heatmaps", t.heatmaps),
        NamedTensor::from_tensor("offsets", t.offsets),
        NamedTensor::from_tensor("heatmap_weight", t.heatmap_weight),
        NamedTensor::from_tensor("offset_weight", t.offset_weight),
        NamedTensor::from_floats("tag_indices",
                                 {static_cast<std::uint32_t>(tags.size()), static_cast<std::uint32_t>(k)},
                                 idx),
    };
    write_tensor_container(fs::path(o.out_dir) / (std::to_string(im.id) + ".lptc"), out);
  });
  spdlog::info("encode: {} images written to {}", set.images.size(), o.out_dir);
  return 0;
}

int run_decode(const Common& c, const DecodeOptions& o) {
  const Setup s = setup(c);
  const auto files = list_containers(o.tensors_dir);
  const int k = s.cfg.keypoints;
  PoseFile result;
  result.keypoint_count = k;
  result.images.resize(files.size());
  parallel_for(files.size(), s.jobs, [&](std::size_t i) {
    const auto& [id, path] = files[i];
    const TensorContainer tc = read_tensor_container(path);
    std::vector<Pose> poses;
    try {
      const Tensor3f heatmaps = find_tensor(tc, "heatmaps").to_tensor3();
      if (o.mode == "center") {
        poses = decode_center_poses(heatmaps, find_tensor(tc, "offsets").to_tensor3(), s.cfg.codec);
      } else {
        const TagMap tags{find_tensor(tc, "tags").to_tensor3()};
        const auto cands =
            extract_keypoint_peaks(keypoint_planes(heatmaps, k, path.string()), tags, s.cfg.codec);
        poses = group_keypoints(cands, s.cfg.codec);
      }
    } catch (const Error& e) {
      throw Error(e.code(), path.string() + ": " + e.detail());
    }
    scale_poses(poses, s.cfg.codec.output_stride);
    result.images[i] = {id, "", std::move(poses)};
  });
  save_poses(o.out, result);
  if (!o.coco_results.empty()) write_file_atomic(o.coco_results, dump_coco_results(result));
  spdlog::info("decode {}: {} images", o.mode, files.size());
  return 0;
}

int run_fuse(const Common& c, const FuseOptions& o) {
  const Setup s = setup(c);
  const PoseFile main = load_poses(o.main, s.cfg.keypoints);
  const PoseFile comp = load_poses(o.comp, s.cfg.keypoints);
  FusionConfig fc = s.cfg.fusion;
  fc.kpt_sigmas = sigmas(s);

  std::set<std::int64_t> ids;
  for (const auto& im : main.images) ids.insert(im.image_id);
  for (const auto& im : comp.images) ids.insert(im.image_id);
  PoseFile out;
  out.keypoint_count = s.cfg.keypoints;
  std::size_t total = 0;
  for (std::int64_t id : ids) {
    const ImagePoses* m = main.find(id);
    const ImagePoses* cp = comp.find(id);
    ImagePoses entry;
    entry.image_id = id;
    entry.file_name = m && !m->file_name.empty() ? m->file_name : (cp ? cp->file_name : "");
    entry.poses = fuse_dual(m ? m->poses : std::vector<Pose>{}, cp ? cp->poses : std::vector<Pose>{}, fc);
    total += entry.poses.size();
    out.images.push_back(std::move(entry));
  }
  save_poses(o.out, out);
  if (!o.coco_results.empty()) write_file_atomic(o.coco_results, dump_coco_results(out));
  spdlog::info("fuse: {} pseudo labels over {} images", total, ids.size());
  return 0;
}

int run_evaluate(const Common& c, const EvaluateOptions& o) {
  const Setup s = setup(c);
  const AnnotationSet gt = load_annotations(o.gt, s.cfg.keypoints);
  const PoseFile pred = load_poses(o.pred, s.cfg.keypoints);
  const EvalReport report = evaluate_ap(align_to_annotations(pred, gt), gt.per_image(), sigmas(s));
  std::cout << eval_report_text(report);
  if (!o.report.empty()) write_file_atomic(o.report, eval_report_json(report));
  return 0;
}

int run_stats(const Common& c, const StatsOptions& o) {
  const Setup s = setup(c);
  const AnnotationSet gt = load_annotations(o.gt, s.cfg.keypoints);
  if (o.mode == "pseudo-labels") {
    if (o.main.empty() || o.comp.empty()) {
      throw UsageError("stats pseudo-labels requires --main and --comp");
    }
    PseudoLabelInputs in;
    in.main = align_to_annotations(load_poses(o.main, s.cfg.keypoints), gt);
    in.comp = align_to_annotations(load_poses(o.comp, s.cfg.keypoints), gt);
    in.gt = gt.per_image();
    const auto rows = pseudo_label_stats(in, s.cfg.stats_oks_thresholds,
                                         s.cfg.stats_overlap_threshold, sigmas(s));
    std::cout << pseudo_label_text(rows);
    if (!o.report.empty()) write_file_atomic(o.report, pseudo_label_json(rows));
  } else {
    if (o.pred.empty()) throw UsageError("stats center-error requires --pred");
    const auto preds = align_to_annotations(load_poses(o.pred, s.cfg.keypoints), gt);
    const auto report = center_error_analysis(preds, gt.per_image(), s.cfg.center_error);
    std::cout << center_error_text(report);
    if (!o.report.empty()) write_file_atomic(o.report, center_error_json(report));
  }
  return 0;
}

int run_loss(const Common& c, const LossOptions& o) {
  const Setup s = setup(c);
  const TensorContainer pred = read_tensor_container(o.pred);
  const TensorContainer gt = read_tensor_container(o.gt);
  const int k = s.cfg.keypoints;
  const LossWeights& w = s.cfg.losses;

  TargetMaps targets;
  targets.heatmaps = find_tensor(gt, "heatmaps").to_tensor3();
  targets.offsets = find_tensor(gt, "offsets").to_tensor3();
  targets.heatmap_weight = find_tensor(gt, "heatmap_weight").to_tensor3();
  targets.offset_weight = find_tensor(gt, "offset_weight").to_tensor3();
  targets.validate();
  const Tensor3f pred_hm = find_tensor(pred, "heatmaps").to_tensor3();

  Json out = Json::object();
  if (const auto* off = try_find_tensor(pred, "offsets"); off && pred_hm.channels == k + 1) {
    const auto m = main_loss(pred_hm, off->to_tensor3(), targets, w);
    out["main"] = {{"heatmap", m.heatmap}, {"offset", m.offset}, {"total", m.total}};
  }
  const auto* tags = try_find_tensor(pred, "tags");
  const auto* idx = try_find_tensor(gt, "tag_indices");
  if (tags && idx) {
    const Tensor3f hm_k = keypoint_planes(pred_hm, k, o.pred);
    const double h = heatmap_loss(hm_k, first_channels(targets.heatmaps, k),
                                  first_channels(targets.heatmap_weight, k));
    const auto persons = tag_persons(*idx, k);
    const bool any = std::any_of(persons.begin(), persons.end(), [](const auto& p) { return !p.empty(); });
    Json comp = {{"heatmap", h}};
    if (any) {
      const auto t = tag_loss(tags->to_tensor3(), persons, w.tag_sigma, w.push_include_self);
      comp["tag_pull"] = t.pull;
      comp["tag_push"] = t.push;
      comp["tag"] = t.total();
      comp["total"] = comp_supervised_loss(h, t.total(), w);
    } else {
      comp["total"] = h;
    }
    out["complementary"] = std::move(comp);
  }
  if (out.empty()) {
    throw Error(ErrorCode::kSchemaError, o.pred + ": needs offsets (K + 1 heatmaps) or tags");
  }
  std::cout << out.dump(1) << "\n";
  return 0;
}

int run_config_dump(const Common& c) {
  const Setup s = setup(c);
  std::cout << serialize_config(s.cfg);
  return 0;
}

}  // namespace lowpose::cli
