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

#include "lowpose/pipeline/annotations.hpp"

#include <set>
#include <unordered_map>

#include "json_util.hpp"
#include "lowpose/pipeline/file_util.hpp"

namespace lowpose {

using detail::Json;

std::vector<std::vector<PersonAnnotation>> AnnotationSet::per_image() const {
  std::unordered_map<std::int64_t, std::size_t> slot;
  for (std::size_t i = 0; i < images.size(); ++i) slot.emplace(images[i].id, i);
  std::vector<std::vector<PersonAnnotation>> out(images.size());
  for (const auto& a : annotations) {
    auto it = slot.find(a.image_id);
    if (it != slot.end()) out[it->second].push_back(a);
  }
  return out;
}

int AnnotationSet::find_image(std::int64_t id) const {
  for (std::size_t i = 0; i < images.size(); ++i) {
    if (images[i].id == id) return static_cast<int>(i);
  }
  return -1;
}

namespace {

ImageInfo parse_image(const Json& j, std::size_t index) {
  const std::string where = "images[" + std::to_string(index) + "]";
  detail::as_object(j, where);
  ImageInfo info;
  info.id = detail::as_integer(detail::member(j, "id", where), where + ".id");
  const std::string who = "image " + std::to_string(info.id);
  info.file_name = detail::as_string(detail::member(j, "file_name", who), who + ".file_name");
  info.width = detail::as_int(detail::member(j, "width", who), who + ".width");
  info.height = detail::as_int(detail::member(j, "height", who), who + ".height");
  if (info.width < 1 || info.height < 1) {
    throw Error(ErrorCode::kSchemaError, who + ": width and height must be positive");
  }
  return info;
}

PersonAnnotation parse_annotation(const Json& j, std::size_t index, int k) {
  const std::string where = "annotations[" + std::to_string(index) + "]";
  detail::as_object(j, where);
  PersonAnnotation a;
  a.id = detail::as_integer(detail::member(j, "id", where), where + ".id");
  const std::string who = "annotation " + std::to_string(a.id);
  a.image_id = detail::as_integer(detail::member(j, "image_id", who), who + ".image_id");

  const Json& kps = detail::as_array(detail::member(j, "keypoints", who), who + ".keypoints");
  if (kps.size() != static_cast<std::size_t>(3 * k)) {
    throw Error(ErrorCode::kSchemaError, who + ": keypoints has " + std::to_string(kps.size()) +
                                             " values, expected " + std::to_string(3 * k));
  }
  a.keypoints.resize(k);
  for (int i = 0; i < k; ++i) {
    const std::string at = who + ".keypoints[" + std::to_string(3 * i) + "]";
    a.keypoints[i].x = static_cast<float>(detail::as_number(kps[3 * i], at));
    a.keypoints[i].y = static_cast<float>(detail::as_number(kps[3 * i + 1], at));
    a.keypoints[i].v = detail::as_int(kps[3 * i + 2], at);
  }

  const Json& bbox = detail::as_array(detail::member(j, "bbox", who), who + ".bbox");
  if (bbox.size() != 4) throw Error(ErrorCode::kSchemaError, who + ": bbox must have 4 values");
  a.bbox = {detail::as_number(bbox[0], who + ".bbox"), detail::as_number(bbox[1], who + ".bbox"),
            detail::as_number(bbox[2], who + ".bbox"), detail::as_number(bbox[3], who + ".bbox")};
  auto area = j.find("area");
  a.area = area == j.end() ? a.bbox.area() : detail::as_number(*area, who + ".area");
  a.validate(k);
  return a;
}

}  // namespace

AnnotationSet parse_annotations(std::string_view json_text, int expected_k) {
  const Json root = detail::parse_json(json_text);
  detail::as_object(root, "annotation file");

  AnnotationSet set;
  const Json& cats = detail::as_array(detail::member(root, "categories", "annotation file"),
                                      "categories");
  if (cats.empty()) throw Error(ErrorCode::kSchemaError, "categories is empty");
  detail::as_object(cats[0], "categories[0]");
  const Json& names = detail::as_array(detail::member(cats[0], "keypoints", "categories[0]"),
                                       "categories[0].keypoints");
  for (std::size_t i = 0; i < names.size(); ++i) {
    set.keypoint_names.push_back(
        detail::as_string(names[i], "categories[0].keypoints[" + std::to_string(i) + "]"));
  }
  const int k = set.keypoint_count();
  if (k < 1) throw Error(ErrorCode::kSchemaError, "categories declare no keypoints");
  if (expected_k > 0 && k != expected_k) {
    throw Error(ErrorCode::kSchemaError, "categories declare " + std::to_string(k) +
                                             " keypoints, expected " + std::to_string(expected_k));
  }

  const Json& images = detail::as_array(detail::member(root, "images", "annotation file"), "images");
  std::set<std::int64_t> image_ids;
  for (std::size_t i = 0; i < images.size(); ++i) {
    set.images.push_back(parse_image(images[i], i));
    if (!image_ids.insert(set.images.back().id).second) {
      throw Error(ErrorCode::kSchemaError,
                  "duplicate image id " + std::to_string(set.images.back().id));
    }
  }

  const Json& anns = detail::as_array(detail::member(root, "annotations", "annotation file"),
                                      "annotations");
  std::set<std::int64_t> ann_ids;
  for (std::size_t i = 0; i < anns.size(); ++i) {
    PersonAnnotation a = parse_annotation(anns[i], i, k);
    if (!ann_ids.insert(a.id).second) {
      throw Error(ErrorCode::kSchemaError, "duplicate annotation id " + std::to_string(a.id));
    }
    if (!image_ids.count(a.image_id)) {
      throw Error(ErrorCode::kDanglingReference, "annotation " + std::to_string(a.id) +
                                                     " references missing image " +
                                                     std::to_string(a.image_id));
    }
    set.annotations.push_back(std::move(a));
  }
  return set;
}

AnnotationSet load_annotations(const std::filesystem::path& path, int expected_k) {
  const std::string text = read_file_text(path);
  try {
    return parse_annotations(text, expected_k);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.detail());
  }
}

std::string dump_annotations(const AnnotationSet& set) {
  Json root = Json::object();
  Json images = Json::array();
  for (const auto& im : set.images) {
    images.push_back(
        {{"id", im.id}, {"file_name", im.file_name}, {"width", im.width}, {"height", im.height}});
  }
  Json anns = Json::array();
  for (const auto& a : set.annotations) {
    Json kps = Json::array();
    for (const auto& kp : a.keypoints) {
      kps.push_back(detail::json_float(kp.x));
      kps.push_back(detail::json_float(kp.y));
      kps.push_back(kp.v);
    }
    anns.push_back({{"id", a.id},
                    {"image_id", a.image_id},
                    {"keypoints", std::move(kps)},
                    {"bbox", {a.bbox.x, a.bbox.y, a.bbox.w, a.bbox.h}},
                    {"area", a.area},
                    {"num_keypoints", a.labeled_count()},
                    {"category_id", 1}});
  }
  root["images"] = std::move(images);
  root["annotations"] = std::move(anns);
  root["categories"] = Json::array(
      {{{"id", 1}, {"name", "person"}, {"supercategory", "person"}, {"keypoints", set.keypoint_names}}});
  return root.dump(1, ' ', false, Json::error_handler_t::replace) + "\n";
}

void save_annotations(const std::filesystem::path& path, const AnnotationSet& set) {
  write_file_atomic(path, dump_annotations(set));
}

}  // namespace lowpose
