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

#include "lowpose/pipeline/poses_json.hpp"

#include <set>
#include <unordered_map>

#include "json_util.hpp"
#include "lowpose/pipeline/file_util.hpp"

namespace lowpose {

using detail::Json;

namespace {

constexpr const char* kFormatName = "lowpose-poses";
constexpr int kFormatVersion = 1;

Pose parse_pose(const Json& j, int k, const std::string& where) {
  detail::as_object(j, where);
  Pose p;
  auto score = j.find("score");
  if (score == j.end() || score->is_null()) {
    throw Error(ErrorCode::kMissingScores, where + ": pose has no score");
  }
  p.score = static_cast<float>(detail::as_number(*score, where + ".score"));

  const Json& kps = detail::as_array(detail::member(j, "keypoints", where), where + ".keypoints");
  if (kps.size() != static_cast<std::size_t>(4 * k)) {
    throw Error(ErrorCode::kSchemaError, where + ": keypoints has " + std::to_string(kps.size()) +
                                             " values, expected " + std::to_string(4 * k));
  }
  p.keypoints.resize(k);
  for (int i = 0; i < k; ++i) {
    const std::string at = where + ".keypoints[" + std::to_string(4 * i) + "]";
    auto& kp = p.keypoints[i];
    kp.x = static_cast<float>(detail::as_number(kps[4 * i], at));
    kp.y = static_cast<float>(detail::as_number(kps[4 * i + 1], at));
    kp.v = detail::as_int(kps[4 * i + 2], at);
    if (kps[4 * i + 3].is_null()) {
      throw Error(ErrorCode::kMissingScores, at + ": keypoint has no score");
    }
    kp.score = static_cast<float>(detail::as_number(kps[4 * i + 3], at));
  }

  const Json& c = detail::as_array(detail::member(j, "center", where), where + ".center");
  if (c.size() != 2) throw Error(ErrorCode::kSchemaError, where + ": center must have 2 values");
  p.center = {detail::as_number(c[0], where + ".center"), detail::as_number(c[1], where + ".center")};

  auto src = j.find("source");
  p.source = src == j.end() ? PoseSource::kMain
                            : pose_source_from_string(detail::as_string(*src, where + ".source"));
  try {
    p.validate(k);
  } catch (const Error& e) {
    throw Error(e.code(), where + ": " + e.detail());
  }
  return p;
}

Json keypoints_json(const Pose& p, bool coco) {
  Json kps = Json::array();
  for (const auto& kp : p.keypoints) {
    kps.push_back(detail::json_float(kp.x));
    kps.push_back(detail::json_float(kp.y));
    if (!coco) kps.push_back(kp.v);
    kps.push_back(detail::json_float(kp.score));
  }
  return kps;
}

}  // namespace

const ImagePoses* PoseFile::find(std::int64_t image_id) const {
  for (const auto& im : images) {
    if (im.image_id == image_id) return &im;
  }
  return nullptr;
}

std::string_view to_string(PoseSource source) {
  switch (source) {
    case PoseSource::kMain:
      return "main";
    case PoseSource::kComplementary:
      return "complementary";
    case PoseSource::kGroundTruth:
      return "ground_truth";
  }
  return "unknown";
}

PoseSource pose_source_from_string(std::string_view name) {
  if (name == "main") return PoseSource::kMain;
  if (name == "complementary") return PoseSource::kComplementary;
  if (name == "ground_truth") return PoseSource::kGroundTruth;
  throw Error(ErrorCode::kSchemaError, "unknown pose source '" + std::string(name) + "'");
}

PoseFile parse_poses(std::string_view json_text, int expected_k) {
  const Json root = detail::parse_json(json_text);
  detail::as_object(root, "pose file");
  const std::string& format =
      detail::as_string(detail::member(root, "format", "pose file"), "pose file.format");
  if (format != kFormatName) {
    throw Error(ErrorCode::kSchemaError, "pose file: format is '" + format + "', expected '" +
                                             kFormatName + "'");
  }
  const int version = detail::as_int(detail::member(root, "version", "pose file"), "version");
  if (version != kFormatVersion) {
    throw Error(ErrorCode::kUnsupportedVersion,
                "pose file: unsupported version " + std::to_string(version));
  }
  PoseFile file;
  file.keypoint_count =
      detail::as_int(detail::member(root, "keypoint_count", "pose file"), "keypoint_count");
  if (file.keypoint_count < 1) throw Error(ErrorCode::kSchemaError, "keypoint_count must be >= 1");
  if (expected_k > 0 && file.keypoint_count != expected_k) {
    throw Error(ErrorCode::kSchemaError, "pose file has " + std::to_string(file.keypoint_count) +
                                             " keypoints, expected " + std::to_string(expected_k));
  }
  const Json& images = detail::as_array(detail::member(root, "images", "pose file"), "images");
  std::set<std::int64_t> seen;
  for (std::size_t i = 0; i < images.size(); ++i) {
    const std::string where = "images[" + std::to_string(i) + "]";
    const Json& im = detail::as_object(images[i], where);
    ImagePoses entry;
    entry.image_id = detail::as_integer(detail::member(im, "image_id", where), where + ".image_id");
    if (!seen.insert(entry.image_id).second) {
      throw Error(ErrorCode::kSchemaError, "duplicate image id " + std::to_string(entry.image_id));
    }
    const std::string who = "image " + std::to_string(entry.image_id);
    if (auto fn = im.find("file_name"); fn != im.end()) {
      entry.file_name = detail::as_string(*fn, who + ".file_name");
    }
    const Json& poses = detail::as_array(detail::member(im, "poses", who), who + ".poses");
    for (std::size_t p = 0; p < poses.size(); ++p) {
      entry.poses.push_back(
          parse_pose(poses[p], file.keypoint_count, who + ".poses[" + std::to_string(p) + "]"));
    }
    file.images.push_back(std::move(entry));
  }
  return file;
}

PoseFile load_poses(const std::filesystem::path& path, int expected_k) {
  const std::string text = read_file_text(path);
  try {
    return parse_poses(text, expected_k);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.detail());
  }
}

std::string dump_poses(const PoseFile& file) {
  Json images = Json::array();
  for (const auto& im : file.images) {
    Json poses = Json::array();
    for (const auto& p : im.poses) {
      poses.push_back({{"keypoints", keypoints_json(p, false)},
                       {"center", {p.center.x, p.center.y}},
                       {"score", detail::json_float(p.score)},
                       {"source", to_string(p.source)}});
    }
    Json entry = {{"image_id", im.image_id}};
    if (!im.file_name.empty()) entry["file_name"] = im.file_name;
    entry["poses"] = std::move(poses);
    images.push_back(std::move(entry));
  }
  Json root = {{"format", kFormatName},
               {"version", kFormatVersion},
               {"keypoint_count", file.keypoint_count},
               {"images", std::move(images)}};
  return root.dump(1, ' ', false, Json::error_handler_t::replace) + "\n";
}

void save_poses(const std::filesystem::path& path, const PoseFile& file) {
  write_file_atomic(path, dump_poses(file));
}

std::string dump_coco_results(const PoseFile& file) {
  Json out = Json::array();
  for (const auto& im : file.images) {
    for (const auto& p : im.poses) {
      out.push_back({{"image_id", im.image_id},
                     {"category_id", 1},
                     {"keypoints", keypoints_json(p, true)},
                     {"score", detail::json_float(p.score)}});
    }
  }
  return out.dump(1, ' ', false, Json::error_handler_t::replace) + "\n";
}

std::vector<std::vector<Pose>> align_to_annotations(const PoseFile& preds, const AnnotationSet& gt) {
  std::unordered_map<std::int64_t, std::size_t> slot;
  for (std::size_t i = 0; i < gt.images.size(); ++i) slot.emplace(gt.images[i].id, i);
  std::vector<std::vector<Pose>> out(gt.images.size());
  for (const auto& im : preds.images) {
    auto it = slot.find(im.image_id);
    if (it == slot.end()) {
      throw Error(ErrorCode::kImageIdMismatch, "predictions reference image " +
                                                   std::to_string(im.image_id) +
                                                   " which the ground truth lacks");
    }
    out[it->second] = im.poses;
  }
  return out;
}

}  // namespace lowpose
