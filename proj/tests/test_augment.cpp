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

#include "lowpose/augment.hpp"
#include "oracles.hpp"

using namespace lowpose;

namespace {

Image random_image(int w, int h, int c, std::mt19937_64& gen) {
  std::uniform_real_distribution<float> u(0.0f, 255.0f);
  Image img(w, h, c);
  for (float& v : img.data()) v = u(gen);
  return img;
}

EllaParams collapsed(double gamma, double b, double c, double var, double p) {
  EllaParams e;
  e.gamma_range = {gamma, gamma};
  e.brightness_range = {b, b};
  e.contrast_range = {c, c};
  e.noise_var_range = {var, var};
  e.per_aug_probability = p;
  return e;
}

}  // namespace

TEST_SUITE("augment") {

TEST_CASE("gamma correction closed form") {
  CHECK(gamma_correct(Image(1, 1, 1, 255.0f), 3.0).at(0, 0, 0) == 255.0f);
  CHECK(gamma_correct(Image(1, 1, 1, 0.0f), 2.5).at(0, 0, 0) == 0.0f);
  // 255 * (64/255)^2 = 4096 / 255
  CHECK(gamma_correct(Image(1, 1, 1, 64.0f), 2.0).at(0, 0, 0) ==
        doctest::Approx(4096.0 / 255.0).epsilon(1e-6));
  CHECK_THROWS_AS(gamma_correct(Image(1, 1, 1), 0.0), Error);
  CHECK_THROWS_AS(gamma_correct(Image(1, 1, 1), std::nan("")), Error);
}

TEST_CASE("brightness scaling") {
  std::mt19937_64 gen(1);
  const Image img = random_image(4, 3, 3, gen);
  CHECK(adjust_brightness(img, 1.0) == img);
  CHECK(adjust_brightness(Image(1, 1, 1, 200.0f), 0.05).at(0, 0, 0) == doctest::Approx(10.0));
  CHECK(adjust_brightness(Image(1, 1, 1, 128.0f), 0.01).at(0, 0, 0) == doctest::Approx(1.28));
  CHECK_THROWS_AS(adjust_brightness(img, -0.1), Error);
  CHECK(adjust_brightness(Image(1, 1, 1, 200.0f), 3.0).at(0, 0, 0) == 255.0f);
}

TEST_CASE("contrast reduction blends toward luma") {
  std::mt19937_64 gen(2);
  const Image img = random_image(4, 3, 3, gen);
  CHECK(reduce_contrast(img, 1.0) == img);
  const Image grey = random_image(4, 3, 1, gen);
  CHECK(reduce_contrast(grey, 0.3) == grey);

  Image px(1, 1, 3);
  px.at(0, 0, 0) = 100.0f;
  const Image out = reduce_contrast(px, 0.5);
  // luma = 0.299 * 100 = 29.9
  CHECK(out.at(0, 0, 0) == doctest::Approx(64.95).epsilon(1e-6));
  CHECK(out.at(0, 0, 1) == doctest::Approx(14.95).epsilon(1e-6));
  CHECK(out.at(0, 0, 2) == doctest::Approx(14.95).epsilon(1e-6));
  CHECK_THROWS_AS(reduce_contrast(img, 1.5), Error);
  CHECK_THROWS_AS(reduce_contrast(img, -0.1), Error);
}

TEST_CASE("gaussian noise statistics") {
  Rng rng(42);
  CHECK(add_gaussian_noise(Image(8, 8, 3, 77.0f), 0.0, rng) == Image(8, 8, 3, 77.0f));

  const Image out = add_gaussian_noise(Image(1000, 1000, 1, 128.0f), 40.0, rng);
  double sum = 0.0, sq = 0.0;
  for (float v : out.data()) sum += v;
  const double mean = sum / out.size();
  for (float v : out.data()) sq += (v - mean) * (v - mean);
  const double sd = std::sqrt(sq / out.size());
  CHECK(std::abs(mean - 128.0) < 0.05);
  CHECK(std::abs(sd - std::sqrt(40.0)) < 0.1);

  const Image dark = add_gaussian_noise(Image(64, 64, 3, 0.0f), 40.0, rng);
  for (float v : dark.data()) REQUIRE(v >= 0.0f);
  CHECK_THROWS_AS(add_gaussian_noise(dark, -1.0, rng), Error);
}

TEST_CASE("ella with probability 0 is the identity") {
  std::mt19937_64 gen(3);
  const Image img = random_image(16, 16, 3, gen);
  Rng rng(9);
  CHECK(ella(img, collapsed(3, 0.02, 0.5, 10, 0.0), rng) == img);
}

TEST_CASE("ella with collapsed ranges composes gamma then brightness") {
  std::mt19937_64 gen(4);
  const Image img = random_image(16, 16, 3, gen);
  Rng rng(9);
  const Image expected = adjust_brightness(gamma_correct(img, 2.0), 0.05);
  CHECK(ella(img, collapsed(2.0, 0.05, 1.0, 0.0, 1.0), rng) == expected);
}

TEST_CASE("ella replays bit-identically under a seed") {
  std::mt19937_64 gen(5);
  const Image img = random_image(32, 16, 3, gen);
  Rng a(123), b(123);
  CHECK(ella(img, EllaParams{}, a) == ella(img, EllaParams{}, b));
}

TEST_CASE("adjusted ella restores patches and darkens the rest") {
  std::mt19937_64 gen(6);
  const Image img = random_image(40, 30, 3, gen);
  AdjustedEllaParams p;
  p.ella = collapsed(2.0, 0.05, 1.0, 0.0, 0.5);

  p.patch_restore_probability = 0.0;
  Rng r0(1);
  const auto none = adjust_ella(img, p, r0);
  CHECK(none.restored_patches.empty());
  CHECK(none.image == adjust_brightness(gamma_correct(img, 2.0), 0.05));

  p.patch_restore_probability = 1.0;
  const Image dark = adjust_brightness(gamma_correct(img, 2.0), 0.05);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed);
    const auto res = adjust_ella(img, p, rng);
    REQUIRE(!res.restored_patches.empty());
    REQUIRE(res.restored_patches.size() <= 3);
    auto inside = [&](int x, int y) {
      for (const auto& b : res.restored_patches) {
        if (x >= b.x && x < b.x + b.w && y >= b.y && y < b.y + b.h) return true;
      }
      return false;
    };
    for (int y = 0; y < img.height(); ++y) {
      for (int x = 0; x < img.width(); ++x) {
        for (int c = 0; c < 3; ++c) {
          const float expect = inside(x, y) ? img.at(x, y, c) : dark.at(x, y, c);
          REQUIRE(res.image.at(x, y, c) == expect);
        }
      }
    }
    for (const auto& b : res.restored_patches) {
      CHECK(b.w >= std::lround(0.1 * 40));
      CHECK(b.w <= std::lround(0.3 * 40));
    }
  }
}

TEST_CASE("pda darkens person boxes only") {
  std::mt19937_64 gen(7);
  const Image img = random_image(30, 20, 3, gen);
  Rng rng(1);
  CHECK(pda(img, {}, PdaParams{}, rng) == img);

  PdaParams half;
  half.brightness_range = {0.5, 0.5};
  const Pose everywhere = lowpose::testing::make_pose({{0, 0}, {29, 19}}, 0.95f);
  CHECK(pda(img, {everywhere}, half, rng) == adjust_brightness(img, 0.5));

  const Pose small = lowpose::testing::make_pose({{5, 5}, {9, 8}}, 0.95f);
  const Image out = pda(img, {small}, PdaParams{}, rng);
  // margin 0.1 * 4 = 0.4 px: box [4.6, 9.4] x [4.6, 8.4] covers columns 4..10, rows 4..9.
  for (int y = 0; y < 20; ++y) {
    for (int x = 0; x < 30; ++x) {
      const bool in_box = x >= 4 && x <= 10 && y >= 4 && y <= 9;
      for (int c = 0; c < 3; ++c) {
        if (in_box) {
          REQUIRE(out.at(x, y, c) <= img.at(x, y, c) * 0.5f + 1e-4f);
        } else {
          REQUIRE(out.at(x, y, c) == img.at(x, y, c));
        }
      }
    }
  }
}

TEST_CASE("pda overlapping boxes compose multiplicatively") {
  const Image img(10, 10, 1, 200.0f);
  PdaParams p;
  p.brightness_range = {0.5, 0.5};
  p.bbox_margin = 0.0;
  const Pose a = lowpose::testing::make_pose({{0, 0}, {5, 5}}, 1.0f);
  const Pose b = lowpose::testing::make_pose({{3, 3}, {8, 8}}, 1.0f);
  Rng rng(0);
  const Image out = pda(img, {a, b}, p, rng);
  CHECK(out.at(1, 1, 0) == 100.0f);
  CHECK(out.at(4, 4, 0) == 50.0f);
  CHECK(out.at(7, 7, 0) == 100.0f);
  CHECK(out.at(9, 0, 0) == 200.0f);
}

TEST_CASE("outputs stay within range for random parameters") {
  std::mt19937_64 gen(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const Image img = random_image(12, 9, 3, gen);
    Rng rng(trial);
    const Image outs[] = {
        gamma_correct(img, 0.1 + 6 * u(gen)),
        adjust_brightness(img, 4 * u(gen)),
        reduce_contrast(img, u(gen)),
        add_gaussian_noise(img, 2000 * u(gen), rng),
        ella(img, EllaParams{}, rng),
        adjust_ella(img, AdjustedEllaParams{}, rng).image,
    };
    for (const auto& o : outs) REQUIRE_NOTHROW(o.validate());
  }
}

TEST_CASE("brightness is monotone and larger gamma darkens") {
  std::mt19937_64 gen(10);
  const Image img = random_image(20, 20, 3, gen);
  const Image lo = adjust_brightness(img, 0.2), hi = adjust_brightness(img, 0.6);
  const Image g1 = gamma_correct(img, 2.0), g2 = gamma_correct(img, 4.0);
  for (std::size_t i = 0; i < img.size(); ++i) {
    REQUIRE(lo.data()[i] <= hi.data()[i]);
    if (img.data()[i] > 0.0f && img.data()[i] < 255.0f) REQUIRE(g1.data()[i] >= g2.data()[i]);
  }
}

TEST_CASE("identity affine keeps image and keypoints") {
  std::mt19937_64 gen(12);
  const Image img = random_image(24, 16, 3, gen);
  PersonAnnotation a = lowpose::testing::make_annotation({{3.5, 4.25}, {20, 10}}, 50.0);
  const KeypointSchema schema = generic_schema(2);
  const auto res = apply_affine(img, {a}, AffineSample{}, 24, 16, schema);
  CHECK(res.image == img);
  CHECK(res.annotations[0].keypoints == a.keypoints);
}

TEST_CASE("pure translation shifts keypoints") {
  const Image img(32, 32, 1, 10.0f);
  PersonAnnotation a = lowpose::testing::make_annotation({{3, 4}, {12, 20}}, 50.0);
  AffineSample s;
  s.tx = 10.0;
  const auto res = apply_affine(img, {a}, s, 32, 32, generic_schema(2));
  CHECK(res.annotations[0].keypoints[0].x == doctest::Approx(13.0));
  CHECK(res.annotations[0].keypoints[1].x == doctest::Approx(22.0));
  CHECK(res.annotations[0].keypoints[1].y == doctest::Approx(20.0));
  CHECK(res.annotations[0].keypoints[0].v == 2);
}

TEST_CASE("flip mirrors pixels and swaps left and right") {
  std::mt19937_64 gen(13);
  const Image img = random_image(17, 9, 3, gen);
  const KeypointSchema schema = crowdpose_schema();
  PersonAnnotation a;
  a.id = 1;
  for (int k = 0; k < 14; ++k) a.keypoints.push_back({float(k), float(k % 7), 2, 1.0f});
  a.bbox = {0, 0, 13, 6};
  a.area = 78;
  AffineSample s;
  s.flip = true;
  const auto res = apply_affine(img, {a}, s, 17, 9, schema);
  for (int y = 0; y < 9; ++y) {
    for (int x = 0; x < 17; ++x) {
      for (int c = 0; c < 3; ++c) REQUIRE(res.image.at(x, y, c) == img.at(16 - x, y, c));
    }
  }
  const auto& out = res.annotations[0].keypoints;
  // left_shoulder (0) now holds the mirrored right_shoulder (1), and so on.
  CHECK(out[0].x == doctest::Approx(16.0 - 1.0));
  CHECK(out[1].x == doctest::Approx(16.0 - 0.0));
  CHECK(out[10].x == doctest::Approx(16.0 - 11.0));
  CHECK(out[12].x == doctest::Approx(16.0 - 12.0));
  CHECK(out[13].y == doctest::Approx(13 % 7));
}

TEST_CASE("keypoints leaving the output become unlabeled") {
  const Image img(20, 20, 1);
  PersonAnnotation a = lowpose::testing::make_annotation({{2, 2}, {15, 15}}, 30.0);
  AffineSample s;
  s.tx = -5.0;
  const auto res = apply_affine(img, {a}, s, 20, 20, generic_schema(2));
  CHECK(res.annotations[0].keypoints[0].v == 0);
  CHECK(res.annotations[0].keypoints[1].v == 2);
}

TEST_CASE("warped bright dot stays with its keypoint") {
  std::mt19937_64 gen(14);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const KeypointSchema schema = generic_schema(1);
  for (int trial = 0; trial < 30; ++trial) {
    const double kx = 20 + 24 * u(gen), ky = 20 + 24 * u(gen);
    Image img(64, 64, 1);
    for (int y = 0; y < 64; ++y) {
      for (int x = 0; x < 64; ++x) {
        const double d2 = (x - kx) * (x - kx) + (y - ky) * (y - ky);
        img.at(x, y, 0) = static_cast<float>(250.0 * std::exp(-d2 / (2 * 1.5 * 1.5)));
      }
    }
    PersonAnnotation a = lowpose::testing::make_annotation({{kx, ky}}, 10.0);
    Rng rng(trial);
    AffineParams params;
    params.output_size = 64;
    params.translation_range = {-5, 5};
    const auto res = random_affine(img, {a}, params, schema, rng);
    const auto& kp = res.annotations[0].keypoints[0];
    if (kp.v == 0) continue;
    int bx = 0, by = 0;
    float best = -1;
    for (int y = 0; y < 64; ++y) {
      for (int x = 0; x < 64; ++x) {
        if (res.image.at(x, y, 0) > best) best = res.image.at(x, y, 0), bx = x, by = y;
      }
    }
    CHECK(std::hypot(bx - kp.x, by - kp.y) <= 1.0);
  }
}

TEST_CASE("parameter validation") {
  EllaParams e;
  e.gamma_range = {5, 2};
  CHECK_THROWS_AS(e.validate(), Error);
  e = EllaParams{};
  e.per_aug_probability = 1.5;
  CHECK_THROWS_AS(e.validate(), Error);
  PdaParams p;
  p.brightness_range = {0.0, 0.5};
  CHECK_THROWS_AS(p.validate(), Error);
  AffineParams a;
  a.scale_range = {0.0, 1.0};
  CHECK_THROWS_AS(a.validate(), Error);
  CHECK_NOTHROW(AdjustedEllaParams{}.validate());
}

}  // TEST_SUITE
