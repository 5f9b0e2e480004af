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

#include <random>

#include "lowpose/hungarian.hpp"
#include "oracles.hpp"

using namespace lowpose;

namespace {

CostMatrix from_rows(const std::vector<std::vector<double>>& rows) {
  CostMatrix c;
  c.rows = static_cast<int>(rows.size());
  c.cols = rows.empty() ? 0 : static_cast<int>(rows[0].size());
  for (const auto& r : rows) c.values.insert(c.values.end(), r.begin(), r.end());
  return c;
}

}  // namespace

TEST_SUITE("hungarian") {

TEST_CASE("identity-favoring matrix") {
  const auto a = hungarian_assign(from_rows({{0, 1, 1}, {1, 0, 1}, {1, 1, 0}}));
  CHECK(a == Assignment{{0, 0}, {1, 1}, {2, 2}});
}

TEST_CASE("two by two") {
  const auto c = from_rows({{4, 1}, {2, 8}});
  const auto a = hungarian_assign(c);
  CHECK(a == Assignment{{0, 1}, {1, 0}});
  CHECK(assignment_cost(c, a) == 3.0);
}

TEST_CASE("rectangular matrices cover the smaller side") {
  const auto wide = from_rows({{5, 1, 9, 3}, {2, 7, 1, 8}});
  const auto a = hungarian_assign(wide);
  CHECK(a.size() == 2);
  CHECK(assignment_cost(wide, a) == 2.0);

  const auto tall = from_rows({{5, 2}, {1, 7}, {9, 1}, {3, 8}});
  const auto b = hungarian_assign(tall);
  CHECK(b.size() == 2);
  CHECK(assignment_cost(tall, b) == 2.0);
  CHECK(b == Assignment{{1, 0}, {2, 1}});
}

TEST_CASE("empty and degenerate inputs") {
  CHECK(hungarian_assign(CostMatrix{}).empty());
  CHECK(hungarian_assign(from_rows({{}})).empty());
  CHECK(hungarian_assign(from_rows({{7}})) == Assignment{{0, 0}});
}

TEST_CASE("non-finite costs are rejected") {
  auto c = from_rows({{1, 2}, {3, 4}});
  c.values[3] = std::numeric_limits<double>::infinity();
  try {
    hungarian_assign(c);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kNonFiniteCost);
  }
  c.values[3] = std::nan("");
  CHECK_THROWS_AS(hungarian_assign(c), Error);
}

TEST_CASE("matches exhaustive search on random matrices") {
  std::mt19937_64 gen(2024);
  std::uniform_int_distribution<int> dim(1, 6);
  std::uniform_real_distribution<double> val(-10.0, 10.0);
  std::uniform_int_distribution<int> small(0, 3);
  for (int trial = 0; trial < 300; ++trial) {
    const int m = dim(gen), n = dim(gen);
    std::vector<std::vector<double>> rows(m, std::vector<double>(n));
    const bool ties = trial % 3 == 0;
    for (auto& r : rows) {
      for (auto& v : r) v = ties ? small(gen) : val(gen);
    }
    const auto c = from_rows(rows);
    const auto a = hungarian_assign(c);
    REQUIRE(a.size() == static_cast<std::size_t>(std::min(m, n)));
    std::vector<int> rs, cs;
    for (auto [r, col] : a) rs.push_back(r), cs.push_back(col);
    std::sort(cs.begin(), cs.end());
    REQUIRE(std::is_sorted(rs.begin(), rs.end()));
    REQUIRE(std::adjacent_find(rs.begin(), rs.end()) == rs.end());
    REQUIRE(std::adjacent_find(cs.begin(), cs.end()) == cs.end());
    CHECK(assignment_cost(c, a) == doctest::Approx(testing::brute_force_assignment(rows)).epsilon(1e-12));
  }
}

TEST_CASE("assignment is deterministic") {
  const auto c = from_rows({{1, 1, 1}, {1, 1, 1}, {1, 1, 1}});
  CHECK(hungarian_assign(c) == hungarian_assign(c));
}

}  // TEST_SUITE
