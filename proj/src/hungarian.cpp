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

#include "lowpose/hungarian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lowpose/error.hpp"

namespace lowpose {

Assignment hungarian_assign(const CostMatrix& cost) {
  for (double v : cost.values) {
    if (!std::isfinite(v)) throw Error(ErrorCode::kNonFiniteCost, "cost matrix has a non-finite entry");
  }
  if (cost.rows == 0 || cost.cols == 0) return {};

  // The potential method below needs rows <= cols; solve the transpose
  // otherwise.
  const bool transposed = cost.rows > cost.cols;
  const int n = transposed ? cost.cols : cost.rows;
  const int m = transposed ? cost.rows : cost.cols;
  auto a = [&](int i, int j) { return transposed ? cost(j, i) : cost(i, j); };

  constexpr double kInf = std::numeric_limits<double>::infinity();
  // 1-based: column 0 is the virtual start column.
  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
  std::vector<int> match_of_col(m + 1, 0), way(m + 1, 0);
  for (int i = 1; i <= n; ++i) {
    match_of_col[0] = i;
    int j0 = 0;
    std::vector<double> minv(m + 1, kInf);
    std::vector<char> used(m + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = match_of_col[j0];
      double delta = kInf;
      int j1 = 0;
      for (int j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double cur = a(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= m; ++j) {
        if (used[j]) {
          u[match_of_col[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match_of_col[j0] != 0);
    do {
      const int j1 = way[j0];
      match_of_col[j0] = match_of_col[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  Assignment out;
  out.reserve(n);
  for (int j = 1; j <= m; ++j) {
    if (match_of_col[j] == 0) continue;
    const int i = match_of_col[j] - 1;
    out.emplace_back(transposed ? j - 1 : i, transposed ? i : j - 1);
  }
  std::sort(out.begin(), out.end());
  return out;
}

double assignment_cost(const CostMatrix& cost, const Assignment& assignment) {
  double total = 0.0;
  for (const auto& [r, c] : assignment) total += cost(r, c);
  return total;
}

}  // namespace lowpose
