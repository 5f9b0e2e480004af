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
#include <random>

#include "lowpose/eval.hpp"
#include "oracles.hpp"

using namespace lowpose;
using testing::make_annotation;
using testing::make_pose;

namespace {

const std::vector<double> kSigmas(4, 0.1);

std::vector<std::pair<double, double>> person_at(double x, double y) {
  return {{x, y}, {x + 10, y}, {x, y + 20}, {x + 10, y + 20}};
}

struct Scene {
  std::vector<std::vector<Pose>> preds;
  std::vector<std::vector<PersonAnnotation>> gts;
};

/// Up to four people and four noisy predictions spread over two images.
Scene random_scene(std::mt19937_64& gen) {
  std::uniform_int_distribution<int> count(0, 4);
  std::uniform_real_distribution<double> u(0, 1);
  std::normal_distribution<double> noise(0, 1);
  Scene s;
  s.preds.resize(2);
  s.gts.resize(2);
  const int n_gt = count(gen);
  const int n_pred = count(gen);
  for (int i = 0; i < n_gt; ++i) {
    s.gts[i % 2].push_back(make_annotation(person_at(15.0 * i, 0), 200.0, i + 1));
  }
  for (int i = 0; i < n_pred; ++i) {
    const int img = u(gen) < 0.5 ? 0 : 1;
    auto pts = person_at(15.0 * std::floor(4 * u(gen)), 0);
    const double sd = 3.0 * u(gen);
    for (auto& [x, y] : pts) {
      x += sd * noise(gen);
      y += sd * noise(gen);
    }
    s.preds[img].push_back(make_pose(pts, float(u(gen))));
  }
  return s;
}

}  // namespace

TEST_SUITE("eval") {
  TEST_CASE("thresholds") {
    const auto t = coco_oks_thresholds();
    REQUIRE(t.size() == 10);
    CHECK(t.front() == 0.5);
    CHECK(t.back() == doctest::Approx(0.95).epsilon(1e-15));
  }

  TEST_CASE("perfect predictions score one") {
    Scene s;
    s.gts = {{make_annotation(person_at(0, 0), 200, 1), make_annotation(person_at(40, 0), 200, 2)},
             {make_annotation(person_at(5, 5), 300, 3)}};
    s.preds.resize(2);
    for (std::size_t i = 0; i < s.gts.size(); ++i) {
      for (const auto& g : s.gts[i]) {
        auto p = g.to_pose();
        p.score = 1.0f;
        s.preds[i].push_back(p);
      }
    }
    const auto r = evaluate_ap(s.preds, s.gts, kSigmas);
    CHECK(r.ap_mean == 1.0);
    CHECK(r.n_gt == 3);
    CHECK(r.n_pred == 3);
    for (const auto& [tau, ap] : r.ap_per_threshold) CHECK(ap == 1.0);
  }

  TEST_CASE("no predictions score zero") {
    const std::vector<std::vector<PersonAnnotation>> gts = {{make_annotation(person_at(0, 0), 200)}};
    CHECK(evaluate_ap({{}}, gts, kSigmas).ap_mean == 0.0);
  }

  TEST_CASE("half recall under 101-point interpolation") {
    // Recall reaches 0.5, so the 51 samples r = 0.00 ... 0.50 see precision 1
    // and the remaining 50 see 0.
    const std::vector<std::vector<PersonAnnotation>> gts = {
        {make_annotation(person_at(0, 0), 200, 1), make_annotation(person_at(60, 0), 200, 2)}};
    const std::vector<std::vector<Pose>> preds = {{make_pose(person_at(0, 0), 1.0f)}};
    for (double tau : coco_oks_thresholds()) {
      CHECK(average_precision(preds, gts, tau, kSigmas) == doctest::Approx(51.0 / 101.0).epsilon(1e-15));
      CHECK(testing::ap_oracle(preds, gts, tau, kSigmas) == doctest::Approx(51.0 / 101.0).epsilon(1e-15));
    }
  }

  TEST_CASE("a lower-scored duplicate between two hits lowers AP") {
    const std::vector<std::vector<PersonAnnotation>> gts = {
        {make_annotation(person_at(0, 0), 200, 1), make_annotation(person_at(60, 0), 200, 2)}};
    std::vector<std::vector<Pose>> preds = {
        {make_pose(person_at(0, 0), 1.0f), make_pose(person_at(60, 0), 0.4f)}};
    const double clean = average_precision(preds, gts, 0.5, kSigmas);
    CHECK(clean == 1.0);
    preds[0].push_back(make_pose(person_at(0, 0), 0.7f));
    const double dup = average_precision(preds, gts, 0.5, kSigmas);
    CHECK(dup < clean);
    CHECK(dup == doctest::Approx((51.0 + 50.0 * 2.0 / 3.0) / 101.0).epsilon(1e-12));
  }

  TEST_CASE("greedy matching agrees with the oracle") {
    std::mt19937_64 gen(1);
    for (int trial = 0; trial < 500; ++trial) {
      const auto s = random_scene(gen);
      for (double tau : coco_oks_thresholds()) {
        REQUIRE(average_precision(s.preds, s.gts, tau, kSigmas) ==
                doctest::Approx(testing::ap_oracle(s.preds, s.gts, tau, kSigmas)).epsilon(1e-12));
      }
    }
  }

  TEST_CASE("only the score ranking matters") {
    std::mt19937_64 gen(2);
    for (int trial = 0; trial < 200; ++trial) {
      auto s = random_scene(gen);
      const auto before = evaluate_ap(s.preds, s.gts, kSigmas);
      for (auto& img : s.preds) {
        for (auto& p : img) p.score = p.score * p.score * 0.5f + 0.1f;
      }
      const auto after = evaluate_ap(s.preds, s.gts, kSigmas);
      CHECK(after.ap_mean == before.ap_mean);
    }
  }

  TEST_CASE("AP does not grow with the threshold") {
    std::mt19937_64 gen(3);
    for (int trial = 0; trial < 300; ++trial) {
      const auto s = random_scene(gen);
      const auto r = evaluate_ap(s.preds, s.gts, kSigmas);
      for (std::size_t i = 1; i < r.ap_per_threshold.size(); ++i) {
        CHECK(r.ap_per_threshold[i].second <= r.ap_per_threshold[i - 1].second);
      }
      double mean = 0;
      for (const auto& [tau, ap] : r.ap_per_threshold) {
        CHECK(ap >= 0.0);
        CHECK(ap <= 1.0);
        mean += ap;
      }
      CHECK(r.ap_mean == doctest::Approx(mean / 10).epsilon(1e-12));
    }
  }

  TEST_CASE("evaluation errors") {
    const std::vector<std::vector<PersonAnnotation>> gts = {{make_annotation(person_at(0, 0), 200)}};
    auto p = make_pose(person_at(0, 0), 1.0f);
    p.score = std::nanf("");
    try {
      evaluate_ap({{p}}, gts, kSigmas);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kMissingScores);
    }
    try {
      evaluate_ap({{}, {}}, gts, kSigmas);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kImageIdMismatch);
    }
  }

  TEST_CASE("center error examples") {
    const std::vector<std::vector<PersonAnnotation>> gts = {{make_annotation({{0, 0}}, 100)}};
    SUBCASE("exact") {
      const auto r = center_error_analysis({{make_pose({{0, 0}}, 1)}}, gts);
      CHECK(r.n_matched == 1);
      CHECK(r.mean_error == 0.0);
      CHECK(r.variance == 0.0);
    }
    SUBCASE("3-4-5") {
      const auto r = center_error_analysis({{make_pose({{3, 4}}, 1), make_pose({{30, 40}}, 1)}}, gts);
      CHECK(r.n_matched == 1);
      CHECK(r.errors == std::vector<double>{5.0});
    }
    SUBCASE("beyond the radius") {
      const auto r = center_error_analysis({{make_pose({{15, 20}}, 1)}}, gts);
      CHECK(r.n_gt == 1);
      CHECK(r.n_matched == 0);
    }
    SUBCASE("radius is exclusive") {
      const auto r = center_error_analysis({{make_pose({{12, 16}}, 1)}}, gts);
      CHECK(r.n_matched == 0);
    }
    SUBCASE("no ground truth") {
      const auto r = center_error_analysis({{make_pose({{1, 1}}, 1)}}, {{}});
      CHECK(r.n_gt == 0);
      CHECK(r.n_matched == 0);
    }
  }

  TEST_CASE("center error on a five-person fixture") {
    std::vector<std::vector<PersonAnnotation>> gts(1);
    std::vector<std::vector<Pose>> preds(1);
    const double offsets[5][2] = {{3, 4}, {0, 0}, {6, 8}, {5, 12}, {7, 24}};
    for (int i = 0; i < 5; ++i) {
      const double x = 100.0 * i;
      gts[0].push_back(make_annotation({{x - 2, 50}, {x + 2, 50}}, 100, i));
      preds[0].push_back(make_pose({{x + offsets[i][0], 50 + offsets[i][1]}}, 0.9f));
    }
    const auto r = center_error_analysis(preds, gts);
    CHECK(r.n_gt == 5);
    CHECK(r.n_matched == 4);
    CHECK(r.mean_error == doctest::Approx(7.0).epsilon(1e-12));
    CHECK(std::abs(r.variance - 24.5) < 1e-9);
    REQUIRE(r.histogram.counts.size() == 20);
    REQUIRE(r.histogram.edges.size() == 21);
    CHECK(r.histogram.edges.back() == 20.0);
    for (int b = 0; b < 20; ++b) {
      const int want = (b == 0 || b == 5 || b == 10 || b == 13) ? 1 : 0;
      CHECK(r.histogram.counts[b] == want);
    }
    for (double e : r.errors) CHECK(e < r.match_radius);
  }

  TEST_CASE("nearest matching may reuse a prediction; one-to-one does not") {
    const std::vector<std::vector<PersonAnnotation>> gts = {
        {make_annotation({{0, 0}}, 100, 1), make_annotation({{6, 0}}, 100, 2)}};
    const std::vector<std::vector<Pose>> preds = {{make_pose({{2, 0}}, 1), make_pose({{20, 0}}, 1)}};
    const auto many = center_error_analysis(preds, gts);
    CHECK(many.errors == std::vector<double>{2.0, 4.0});
    CenterErrorOptions opt;
    opt.one_to_one = true;
    const auto one = center_error_analysis(preds, gts, opt);
    CHECK(one.errors == std::vector<double>{2.0, 14.0});
  }
}
