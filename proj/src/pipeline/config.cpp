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

#include "lowpose/pipeline/config.hpp"

#include <charconv>
#include <cmath>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "json_util.hpp"
#include "lowpose/pipeline/file_util.hpp"

namespace lowpose {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split_commas(std::string_view s) {
  std::vector<std::string_view> out;
  if (trim(s).empty()) return out;
  std::size_t start = 0;
  while (true) {
    const auto comma = s.find(',', start);
    out.push_back(trim(s.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

[[noreturn]] void bad_value(std::string_view what, std::string_view value) {
  throw Error(ErrorCode::kConfigError,
              "expected " + std::string(what) + ", got '" + std::string(value) + "'");
}

double to_double(std::string_view s) {
  s = trim(s);
  double v = 0.0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || !std::isfinite(v)) bad_value("a number", s);
  return v;
}

template <class I>
I to_integer(std::string_view s) {
  s = trim(s);
  I v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || s.empty()) bad_value("an integer", s);
  return v;
}

bool to_bool(std::string_view s) {
  s = trim(s);
  if (s == "true") return true;
  if (s == "false") return false;
  bad_value("true or false", s);
}

Range to_range(std::string_view s) {
  const auto parts = split_commas(s);
  if (parts.size() != 2) bad_value("a range 'lo, hi'", s);
  return {to_double(parts[0]), to_double(parts[1])};
}

IntRange to_int_range(std::string_view s) {
  const auto parts = split_commas(s);
  if (parts.size() != 2) bad_value("a range 'lo, hi'", s);
  return {to_integer<int>(parts[0]), to_integer<int>(parts[1])};
}

std::vector<double> to_list(std::string_view s) {
  std::vector<double> out;
  for (auto part : split_commas(s)) out.push_back(to_double(part));
  return out;
}

std::string fmt(double v) {
  char buf[32];
  auto r = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, r.ptr);
}
std::string fmt(int v) { return std::to_string(v); }
std::string fmt(std::uint64_t v) { return std::to_string(v); }
std::string fmt(bool v) { return v ? "true" : "false"; }
std::string fmt(const Range& r) { return fmt(r.lo) + ", " + fmt(r.hi); }
std::string fmt(const IntRange& r) { return fmt(r.lo) + ", " + fmt(r.hi); }
std::string fmt(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + fmt(v[i]);
  return out;
}

struct Key {
  const char* name;
  std::function<void(PipelineConfig&, std::string_view)> parse;
  std::function<std::string(const PipelineConfig&)> format;
};

template <class T>
T parse_as(std::string_view s) {
  if constexpr (std::is_same_v<T, double>) {
    return to_double(s);
  } else if constexpr (std::is_same_v<T, bool>) {
    return to_bool(s);
  } else if constexpr (std::is_same_v<T, Range>) {
    return to_range(s);
  } else if constexpr (std::is_same_v<T, IntRange>) {
    return to_int_range(s);
  } else if constexpr (std::is_same_v<T, std::vector<double>>) {
    return to_list(s);
  } else {
    return to_integer<T>(s);
  }
}

/// A key bound to the field reached by `get`.
template <class Get>
Key bind(const char* name, Get get) {
  using T = std::remove_reference_t<decltype(get(std::declval<PipelineConfig&>()))>;
  return {name,
          [get](PipelineConfig& c, std::string_view s) { get(c) = parse_as<T>(s); },
          [get](const PipelineConfig& c) { return fmt(get(const_cast<PipelineConfig&>(c))); }};
}

#define LP_KEY(name, field) bind(name, [](PipelineConfig& c) -> auto& { return c.field; })

const std::vector<Key>& keys() {
  static const std::vector<Key> table = {
      LP_KEY("pipeline.keypoints", keypoints),
      LP_KEY("pipeline.seed", seed),
      Key{"paths.schema",
          [](PipelineConfig& c, std::string_view s) { c.schema_path = std::string(trim(s)); },
          [](const PipelineConfig& c) { return c.schema_path; }},
      LP_KEY("ella.gamma_range", ella.gamma_range),
      LP_KEY("ella.brightness_range", ella.brightness_range),
      LP_KEY("ella.contrast_range", ella.contrast_range),
      LP_KEY("ella.noise_var_range", ella.noise_var_range),
      LP_KEY("ella.probability", ella.per_aug_probability),
      LP_KEY("adjusted_ella.patch_restore_probability", adjusted_ella.patch_restore_probability),
      LP_KEY("adjusted_ella.patch_count_range", adjusted_ella.patch_count_range),
      LP_KEY("adjusted_ella.patch_size_fraction_range", adjusted_ella.patch_size_fraction_range),
      LP_KEY("pda.brightness_range", pda.brightness_range),
      LP_KEY("pda.bbox_margin", pda.bbox_margin),
      LP_KEY("affine.rotation_range", affine.rotation_range),
      LP_KEY("affine.scale_range", affine.scale_range),
      LP_KEY("affine.translation_range", affine.translation_range),
      LP_KEY("affine.flip_probability", affine.flip_probability),
      LP_KEY("affine.output_size", affine.output_size),
      LP_KEY("codec.heatmap_sigma", codec.heatmap_sigma),
      LP_KEY("codec.output_stride", codec.output_stride),
      LP_KEY("codec.peak_threshold", codec.peak_threshold),
      LP_KEY("codec.local_max_window", codec.local_max_window),
      LP_KEY("codec.max_people", codec.max_people),
      LP_KEY("codec.tag_group_threshold", codec.tag_group_threshold),
      LP_KEY("codec.offset_radius", codec.offset_radius),
      LP_KEY("losses.lambda_m", losses.lambda_m),
      LP_KEY("losses.lambda_c", losses.lambda_c),
      LP_KEY("losses.lambda_sup", losses.lambda_sup),
      LP_KEY("losses.lambda_unsup", losses.lambda_unsup),
      LP_KEY("losses.smooth_l1_beta", losses.smooth_l1_beta),
      LP_KEY("losses.tag_sigma", losses.tag_sigma),
      LP_KEY("losses.push_include_self", losses.push_include_self),
      LP_KEY("fusion.s_m", fusion.s_m),
      LP_KEY("fusion.s_c", fusion.s_c),
      LP_KEY("fusion.nms_oks_threshold", fusion.nms_oks_threshold),
      LP_KEY("fusion.kpt_sigmas", fusion.kpt_sigmas),
      LP_KEY("eval.center_radius", center_error.radius),
      LP_KEY("eval.histogram_bin_width", center_error.bin_width),
      LP_KEY("eval.center_one_to_one", center_error.one_to_one),
      LP_KEY("stats.oks_thresholds", stats_oks_thresholds),
      LP_KEY("stats.overlap_threshold", stats_overlap_threshold),
  };
  return table;
}

#undef LP_KEY

void sync_mirrors(PipelineConfig& cfg) {
  cfg.adjusted_ella.ella = cfg.ella;
  cfg.codec.keypoint_count = cfg.keypoints;
}

template <class F>
void check_section(const char* section, F&& f) {
  try {
    f();
  } catch (const Error& e) {
    throw Error(ErrorCode::kConfigError, std::string(section) + ": " + e.detail());
  }
}

}  // namespace

void PipelineConfig::validate() const {
  if (keypoints < 1) throw Error(ErrorCode::kConfigError, "pipeline.keypoints must be >= 1");
  check_section("ella", [&] { ella.validate(); });
  check_section("adjusted_ella", [&] { adjusted_ella.validate(); });
  check_section("pda", [&] { pda.validate(); });
  check_section("affine", [&] { affine.validate(); });
  check_section("codec", [&] { codec.validate(); });
  check_section("losses", [&] { losses.validate(); });
  check_section("fusion", [&] {
    FusionConfig f = fusion;
    if (f.kpt_sigmas.empty()) f.kpt_sigmas.assign(keypoints, 1.0);
    f.validate(keypoints);
  });
  if (!(center_error.radius > 0.0) || !(center_error.bin_width > 0.0)) {
    throw Error(ErrorCode::kConfigError, "eval: radius and bin width must be positive");
  }
  for (double t : stats_oks_thresholds) {
    if (!(t >= 0.0 && t <= 1.0)) {
      throw Error(ErrorCode::kConfigError, "stats: OKS thresholds must lie in [0, 1]");
    }
  }
  if (!(stats_overlap_threshold >= 0.0 && stats_overlap_threshold <= 1.0)) {
    throw Error(ErrorCode::kConfigError, "stats: overlap threshold must lie in [0, 1]");
  }
}

std::vector<double> PipelineConfig::kpt_sigmas(const KeypointSchema& schema) const {
  return fusion.kpt_sigmas.empty() ? schema.oks_sigmas : fusion.kpt_sigmas;
}

PipelineConfig parse_config(std::string_view text, const std::filesystem::path& base_dir) {
  std::map<std::string_view, const Key*> index;
  for (const auto& k : keys()) index.emplace(k.name, &k);

  PipelineConfig cfg;
  cfg.base_dir = base_dir;
  std::set<std::string> seen;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::string at = "line " + std::to_string(line_no);
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::kConfigError, at + ": expected 'key = value'");
    }
    const std::string key(trim(line.substr(0, eq)));
    auto it = index.find(key);
    if (it == index.end()) throw Error(ErrorCode::kConfigError, at + ": unknown key '" + key + "'");
    if (!seen.insert(key).second) {
      throw Error(ErrorCode::kConfigError, at + ": duplicate key '" + key + "'");
    }
    try {
      it->second->parse(cfg, line.substr(eq + 1));
    } catch (const Error& e) {
      throw Error(ErrorCode::kConfigError, at + ": " + key + ": " + e.detail());
    }
  }
  sync_mirrors(cfg);
  cfg.validate();
  return cfg;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  const std::string text = read_file_text(path);
  try {
    return parse_config(text, path.parent_path());
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.detail());
  }
}

std::string serialize_config(const PipelineConfig& cfg) {
  std::string out;
  std::string section;
  for (const auto& k : keys()) {
    const std::string_view name = k.name;
    const std::string sec(name.substr(0, name.find('.')));
    if (sec != section) {
      if (!section.empty()) out += "\n";
      out += "# " + sec + "\n";
      section = sec;
    }
    const std::string value = k.format(cfg);
    out += std::string(name) + " =" + (value.empty() ? "" : " " + value) + "\n";
  }
  return out;
}

KeypointSchema parse_schema(std::string_view json_text) {
  using detail::Json;
  const Json root = detail::parse_json(json_text);
  detail::as_object(root, "schema");
  KeypointSchema s;
  const Json& names = detail::as_array(detail::member(root, "names", "schema"), "schema.names");
  for (const auto& n : names) s.names.push_back(detail::as_string(n, "schema.names"));
  if (auto fp = root.find("flip_pairs"); fp != root.end()) {
    for (const auto& pair : detail::as_array(*fp, "schema.flip_pairs")) {
      detail::as_array(pair, "schema.flip_pairs");
      if (pair.size() != 2) throw Error(ErrorCode::kSchemaError, "flip pairs need two indices");
      s.flip_pairs.emplace_back(detail::as_int(pair[0], "schema.flip_pairs"),
                                detail::as_int(pair[1], "schema.flip_pairs"));
    }
  }
  const Json& sig = detail::as_array(detail::member(root, "oks_sigmas", "schema"), "schema.oks_sigmas");
  for (const auto& v : sig) s.oks_sigmas.push_back(detail::as_number(v, "schema.oks_sigmas"));
  s.validate();
  return s;
}

KeypointSchema load_schema(const std::filesystem::path& path) {
  const std::string text = read_file_text(path);
  try {
    return parse_schema(text);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.detail());
  }
}

KeypointSchema resolve_schema(const PipelineConfig& cfg) {
  KeypointSchema s;
  if (!cfg.schema_path.empty()) {
    std::filesystem::path p = cfg.schema_path;
    if (p.is_relative()) p = cfg.base_dir / p;
    s = load_schema(p);
  } else {
    s = cfg.keypoints == kDefaultKeypointCount ? crowdpose_schema() : generic_schema(cfg.keypoints);
  }
  if (s.size() != cfg.keypoints) {
    throw Error(ErrorCode::kConfigError, "schema has " + std::to_string(s.size()) +
                                             " keypoints but pipeline.keypoints is " +
                                             std::to_string(cfg.keypoints));
  }
  return s;
}

}  // namespace lowpose
