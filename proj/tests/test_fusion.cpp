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

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "lowpose/fusion.hpp"
#include "lowpose/schema.hpp"
#include "oracles.hpp"

using namespace lowpose;
using testing::make_annotation;
using testing::make_pose;

namespace {

FusionConfig fusion_config(int k) {
  FusionConfig cfg;
  cfg.kpt_sigmas.assign(k, 0.1);
  return cfg;
}

double hull_area(const Pose& p) {
  double x0 = 1e18, y0 = 1e18, x1 = -1e18, y1 = -1e18;
  for (const auto& kp : p.keypoints) {
    if (!kp.labeled() || kp.score <= 0) continue;
    x0 = std::min(x0, double(kp.x));
    y0 = std::min(y0, double(kp.y));
    x1 = std::max(x1, double(kp.x));
    y1 = std::max(y1, double(kp.y));
  }
  if (x1 < x0) return 1.0;
  return std::max(1.0, (x1 - x0) * (y1 - y0));
}

/// Selection-based greedy suppression: pick the best survivor, drop its
/// neighbours, repeat.
std::vector<Pose> nms_oracle(std::vector<Pose> pool, const FusionConfig& cfg) {
  std::vector<Pose> kept;
  while (!pool.empty()) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < pool.size(); ++i) {
      const auto& a = pool[i];
      const auto& b = pool[best];
      if (a.score > b.score ||
          (a.score == b.score && a.source == PoseSource::kMain && b.source != PoseSource::kMain)) {
        best = i;
      }
    }
    const Pose top = pool[best];
    kept.push_back(top);
    pool.erase(pool.begin() + best);
    const double area = hull_area(top);
    std::vector<Pose> rest;
    for (const auto& p : pool) {
      if (testing::oks_oracle(p.keypoints, top.keypoints, area, cfg.kpt_sigmas) <= cfg.nms_oks_threshold) {
        rest.push_back(p);
      }
    }
    pool = std::move(rest);
  }
  return kept;
}

std::vector<Pose> random_poses(int n, int k, std::mt19937_64& gen) {
  std::uniform_real_distribution<double> c(10, 40);
  std::uniform_real_distribution<float> s(0.0f, 1.0f);
  std::bernoulli_distribution comp(0.5);
  std::vector<Pose> out;
  for (int i = 0; i < n; ++i) {
    out.push_back(make_pose(testing::scatter(c(gen), c(gen), k, 6, gen), s(gen),
                            comp(gen) ? PoseSource::kComplementary : PoseSource::kMain));
  }
  return out;
}

/// Three people far apart, four keypoints each.
std::vector<std::vector<std::pair<double, double>>> three_people() {
  return {{{10, 10}, {20, 10}, {10, 30}, {20, 30}},
          {{60, 10}, {70, 10}, {60, 30}, {70, 30}},
          {{110, 10}, {120, 10}, {110, 30}, {120, 30}}};
}

}  // namespace

TEST_SUITE("fusion") {
  TEST_CASE("select_confident is a strict filter") {
    const auto p = [](float s) { return make_pose({{0, 0}}, s); };
    const std::vector<Pose> poses = {p(0.95f), p(0.9f), p(0.85f)};
    CHECK(select_confident(poses, 0.0).size() == 3);
    const auto kept = select_confident(poses, 0.9);
    REQUIRE(kept.size() == 1);
    CHECK(kept[0].score == 0.95f);
    CHECK(select_confident({}, 0.5).empty());
  }

  TEST_CASE("pose_oks closed forms") {
    const std::vector<double> sigmas = {0.1};
    const auto ref = make_pose({{5, 5}}, 1);
    CHECK(pose_oks(ref, ref, 30.0, sigmas) == 1.0);
    // d^2 = 2 * area * sigma^2.
    const double area = 50.0;
    const double d = std::sqrt(2 * area * 0.01);
    CHECK(pose_oks(make_pose({{5 + d, 5}}, 1), ref, area, sigmas) ==
          doctest::Approx(std::exp(-1.0)).epsilon(1e-6));
    CHECK(pose_oks(make_pose({{1e6, 5}}, 1), ref, area, sigmas) == 0.0);
    CHECK_THROWS_AS(pose_oks(ref, ref, 0.0, sigmas), Error);
    auto blank = ref;
    blank.keypoints[0].v = 0;
    CHECK_THROWS_AS(pose_oks(ref, blank, 1.0, sigmas), Error);
  }

  TEST_CASE("pose_oks skips keypoints unlabeled in the reference") {
    const std::vector<double> sigmas = {0.1, 0.1};
    auto ref = make_pose({{0, 0}, {10, 10}}, 1);
    ref.keypoints[1].v = 0;
    const auto cand = make_pose({{0, 0}, {500, 500}}, 1);
    CHECK(pose_oks(cand, ref, 10.0, sigmas) == 1.0);
  }

  TEST_CASE("pose_oks matches the oracle") {
    std::mt19937_64 gen(1);
    const auto sigmas = crowdpose_schema().oks_sigmas;
    for (int trial = 0; trial < 100; ++trial) {
      const auto a = make_pose(testing::scatter(20, 20, 14, 8, gen), 1);
      const auto b = make_pose(testing::scatter(20, 20, 14, 8, gen), 1);
      const double area = 40.0 + trial;
      CHECK(pose_oks(a, b, area, sigmas) ==
            doctest::Approx(testing::oks_oracle(a.keypoints, b.keypoints, area, sigmas)).epsilon(1e-12));
      CHECK(pose_oks(a, a, area, sigmas) == 1.0);
    }
  }

  TEST_CASE("nms keeps the higher of two duplicates") {
    const auto cfg = fusion_config(2);
    const auto a = make_pose({{0, 0}, {10, 10}}, 0.8f);
    const auto b = make_pose({{0, 0}, {10, 10}}, 0.9f);
    const auto out = pose_nms({a, b}, cfg);
    REQUIRE(out.size() == 1);
    CHECK(out[0].score == 0.9f);
  }

  TEST_CASE("nms keeps distant poses") {
    const auto cfg = fusion_config(2);
    const auto out = pose_nms({make_pose({{0, 0}, {10, 10}}, 0.8f), make_pose({{90, 90}, {100, 100}}, 0.9f)}, cfg);
    CHECK(out.size() == 2);
  }

  TEST_CASE("nms breaks score ties toward the main teacher") {
    const auto cfg = fusion_config(2);
    const auto c = make_pose({{0, 0}, {10, 10}}, 0.7f, PoseSource::kComplementary);
    const auto m = make_pose({{0, 0}, {10, 10}}, 0.7f, PoseSource::kMain);
    const auto out = pose_nms({c, m}, cfg);
    REQUIRE(out.size() == 1);
    CHECK(out[0].source == PoseSource::kMain);
  }

  TEST_CASE("nms agrees with the selection oracle") {
    std::mt19937_64 gen(2);
    auto cfg = fusion_config(5);
    cfg.kpt_sigmas = {0.3, 0.3, 0.3, 0.3, 0.3};
    for (int trial = 0; trial < 300; ++trial) {
      const auto poses = random_poses(6, 5, gen);
      const auto got = pose_nms(poses, cfg);
      const auto want = nms_oracle(poses, cfg);
      REQUIRE(got == want);
    }
  }

  TEST_CASE("nms is idempotent and its output an antichain") {
    std::mt19937_64 gen(3);
    auto cfg = fusion_config(5);
    cfg.kpt_sigmas.assign(5, 0.3);
    for (int trial = 0; trial < 200; ++trial) {
      const auto once = pose_nms(random_poses(12, 5, gen), cfg);
      CHECK(pose_nms(once, cfg) == once);
      // Kept poses come out in rank order; each earlier one is the reference.
      for (std::size_t i = 0; i < once.size(); ++i) {
        for (std::size_t j = i + 1; j < once.size(); ++j) {
          CHECK(pose_oks(once[j], once[i], pose_reference_area(once[i]), cfg.kpt_sigmas) <=
                cfg.nms_oks_threshold);
        }
      }
    }
  }

  TEST_CASE("fuse_dual examples") {
    const auto cfg = fusion_config(4);
    const auto people = three_people();
    SUBCASE("no complementary poses") {
      const std::vector<Pose> main = {make_pose(people[0], 0.95f), make_pose(people[1], 0.5f)};
      CHECK(fuse_dual(main, {}, cfg) == pose_nms(select_confident(main, 0.9), cfg));
    }
    SUBCASE("one person seen by both teachers") {
      const auto out = fuse_dual({make_pose(people[0], 0.95f)},
                                 {make_pose(people[0], 0.8f, PoseSource::kComplementary)}, cfg);
      REQUIRE(out.size() == 1);
      CHECK(out[0].source == PoseSource::kMain);
    }
    SUBCASE("everything below threshold") {
      CHECK(fuse_dual({make_pose(people[0], 0.9f)},
                      {make_pose(people[1], 0.5f, PoseSource::kComplementary)}, cfg)
                .empty());
    }
    SUBCASE("complementary teacher adds a missed person") {
      std::vector<Pose> comp;
      for (const auto& p : people) comp.push_back(make_pose(p, 0.7f, PoseSource::kComplementary));
      const auto out = fuse_dual({make_pose(people[0], 0.95f), make_pose(people[1], 0.92f)}, comp, cfg);
      REQUIRE(out.size() == 3);
      int from_comp = 0;
      for (const auto& p : out) from_comp += p.source == PoseSource::kComplementary;
      CHECK(from_comp == 1);
    }
  }

  TEST_CASE("identical teachers with equal thresholds deduplicate") {
    std::mt19937_64 gen(4);
    auto cfg = fusion_config(5);
    cfg.kpt_sigmas.assign(5, 0.3);
    cfg.s_c = cfg.s_m = 0.3;
    for (int trial = 0; trial < 50; ++trial) {
      auto main = random_poses(8, 5, gen);
      for (auto& p : main) p.source = PoseSource::kMain;
      auto comp = main;
      for (auto& p : comp) p.source = PoseSource::kComplementary;
      CHECK(fuse_dual(main, comp, cfg) == pose_nms(select_confident(main, 0.3), cfg));
    }
  }

  TEST_CASE("raising s_m never grows the main-only fused set") {
    std::mt19937_64 gen(5);
    auto cfg = fusion_config(5);
    cfg.kpt_sigmas.assign(5, 0.3);
    for (int trial = 0; trial < 100; ++trial) {
      auto main = random_poses(10, 5, gen);
      std::size_t prev = SIZE_MAX;
      for (double s = 0.0; s <= 1.0; s += 0.1) {
        cfg.s_m = s;
        const auto n = fuse_dual(main, {}, cfg).size();
        CHECK(n <= prev);
        prev = n;
      }
    }
  }

  TEST_CASE("dropping a main pose can release complementary poses it suppressed") {
    // One wide main pose overlaps two complementary poses that do not overlap
    // each other; removing it lets both through.
    FusionConfig cfg;
    cfg.kpt_sigmas = {0.5, 0.5};
    cfg.nms_oks_threshold = 0.3;
    const auto wide = make_pose({{0, 0}, {20, 20}}, 0.95f);
    const auto left = make_pose({{0, 0}, {12, 12}}, 0.7f, PoseSource::kComplementary);
    const auto right = make_pose({{8, 8}, {20, 20}}, 0.7f, PoseSource::kComplementary);
    cfg.s_m = 0.9;
    CHECK(fuse_dual({wide}, {left, right}, cfg).size() == 1);
    cfg.s_m = 0.96;
    CHECK(fuse_dual({wide}, {left, right}, cfg).size() == 2);
  }

  TEST_CASE("pseudo-label statistics on a three-person scene") {
    const auto people = three_people();
    PseudoLabelInputs in;
    in.gt = {{}};
    in.main = {{}};
    in.comp = {{}};
    for (int i = 0; i < 3; ++i) {
      in.gt[0].push_back(make_annotation(people[i], 200.0, i + 1));
      in.comp[0].push_back(make_pose(people[i], 0.7f, PoseSource::kComplementary));
    }
    in.main[0] = {make_pose(people[0], 0.95f), make_pose(people[1], 0.93f)};
    const std::vector<double> sigmas(4, 0.1);
    const auto rows = pseudo_label_stats(in, {0.3, 0.5, 0.7, 0.9}, 0.5, sigmas);
    REQUIRE(rows.size() == 4);
    for (const auto& r : rows) {
      CHECK(r.n_main_valid == 2);
      CHECK(r.n_comp_valid == 3);
      CHECK(r.n_additional == 1);
      CHECK(r.pct_additional == 50.0);
    }
  }

  TEST_CASE("identical teachers add nothing") {
    std::mt19937_64 gen(6);
    PseudoLabelInputs in;
    in.gt.resize(3);
    in.main.resize(3);
    for (int img = 0; img < 3; ++img) {
      for (int i = 0; i < 4; ++i) {
        const auto pts = testing::scatter(30.0 * i, 20, 5, 5, gen);
        in.gt[img].push_back(make_annotation(pts, 150.0, i));
        auto noisy = pts;
        for (auto& [x, y] : noisy) x += 0.3 * i;
        in.main[img].push_back(make_pose(noisy, 0.9f));
      }
    }
    in.comp = in.main;
    for (const auto& r : pseudo_label_stats(in, {0.3, 0.5, 0.7, 0.9, 0.95}, 0.5, std::vector<double>(5, 0.1))) {
      CHECK(r.n_additional == 0);
      CHECK(r.n_main_valid == r.n_comp_valid);
    }
  }

  TEST_CASE("one ground truth validates at most one label") {
    const auto people = three_people();
    PseudoLabelInputs in;
    in.gt = {{make_annotation(people[0], 200.0)}};
    in.main = {{make_pose(people[0], 0.95f), make_pose(people[0], 0.94f)}};
    in.comp = {{}};
    const auto rows = pseudo_label_stats(in, {0.5}, 0.5, std::vector<double>(4, 0.1));
    CHECK(rows[0].n_main_valid == 1);
    CHECK(rows[0].pct_additional == 0.0);
  }

  TEST_CASE("pseudo-label inputs must cover the same images") {
    PseudoLabelInputs in;
    in.gt.resize(2);
    in.main.resize(1);
    in.comp.resize(2);
    CHECK_THROWS_AS(pseudo_label_stats(in, {0.5}, 0.5, std::vector<double>(4, 0.1)), Error);
  }

  TEST_CASE("center_of") {
    CHECK(center_of(make_pose({{0, 0}, {2, 2}}, 1)) == Point2{1, 1});
    CHECK(center_of(make_pose({{3, 4}}, 1)) == Point2{3, 4});
    std::vector<std::pair<double, double>> circle;
    for (int i = 0; i < 14; ++i) {
      const double a = 2 * std::numbers::pi * i / 14;
      circle.emplace_back(50 + 17 * std::cos(a), 40 + 17 * std::sin(a));
    }
    const auto c = center_of(make_pose(circle, 1));
    CHECK(std::abs(c.x - 50) < 1e-6);
    CHECK(std::abs(c.y - 40) < 1e-6);
    auto blank = make_pose({{1, 1}}, 1);
    blank.keypoints[0].v = 0;
    CHECK_THROWS_AS(center_of(blank), Error);
  }

  TEST_CASE("config validation") {
    auto cfg = fusion_config(14);
    CHECK_NOTHROW(cfg.validate(14));
    CHECK_THROWS_AS(cfg.validate(13), Error);
    cfg.s_m = 1.5;
    CHECK_THROWS_AS(cfg.validate(14), Error);
    cfg = fusion_config(2);
    cfg.kpt_sigmas[1] = 0.0;
    CHECK_THROWS_AS(cfg.validate(2), Error);
  }
}
