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

#include "lowpose/schema.hpp"

#include <cmath>
#include <numeric>

#include "lowpose/error.hpp"

namespace lowpose {

std::vector<int> KeypointSchema::flip_permutation() const {
  std::vector<int> perm(names.size());
  std::iota(perm.begin(), perm.end(), 0);
  for (const auto& [a, b] : flip_pairs) {
    perm[a] = b;
    perm[b] = a;
  }
  return perm;
}

void KeypointSchema::validate() const {
  const int k = size();
  if (k < 1) throw Error(ErrorCode::kSchemaError, "keypoint schema is empty");
  if (static_cast<int>(oks_sigmas.size()) != k) {
    throw Error(ErrorCode::kSchemaError, "schema needs one OKS sigma per keypoint");
  }
  for (double s : oks_sigmas) {
    if (!(s > 0.0) || !std::isfinite(s)) {
      throw Error(ErrorCode::kSchemaError, "OKS sigmas must be positive");
    }
  }
  std::vector<int> seen(k, 0);
  for (const auto& [a, b] : flip_pairs) {
    if (a < 0 || b < 0 || a >= k || b >= k || a == b || seen[a]++ || seen[b]++) {
      throw Error(ErrorCode::kSchemaError, "flip pairs must be disjoint keypoint index pairs");
    }
  }
}

KeypointSchema crowdpose_schema() {
  KeypointSchema s;
  s.names = {"left_shoulder", "right_shoulder", "left_elbow", "right_elbow", "left_wrist",
             "right_wrist",   "left_hip",       "right_hip",  "left_knee",   "right_knee",
             "left_ankle",    "right_ankle",    "head",       "neck"};
  s.flip_pairs = {{0, 1}, {2, 3}, {4, 5}, {6, 7}, {8, 9}, {10, 11}};
  const double toolkit[] = {.79, .79, .72, .72, .62, .62, 1.07, 1.07, .87, .87, .89, .89, .79, .79};
  for (double t : toolkit) s.oks_sigmas.push_back(2.0 * t / 10.0);
  return s;
}

KeypointSchema generic_schema(int k) {
  if (k < 1) throw Error(ErrorCode::kInvalidParam, "keypoint count must be >= 1");
  KeypointSchema s;
  for (int i = 0; i < k; ++i) s.names.push_back("kp" + std::to_string(i));
  s.oks_sigmas.assign(k, 0.158);
  return s;
}

}  // namespace lowpose
