// Copyright 2026 The Coref Authors.
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

#include "coref/hungarian.hpp"

#include <limits>

namespace coref {

std::vector<int> max_weight_assignment(const Eigen::MatrixXd& weights) {
  const bool transposed = weights.rows() > weights.cols();
  // Work on an n x m cost matrix with n <= m; minimizing -w.
  const Eigen::MatrixXd cost = transposed ? Eigen::MatrixXd(-weights.transpose()) : Eigen::MatrixXd(-weights);
  const int n = static_cast<int>(cost.rows());
  const int m = static_cast<int>(cost.cols());
  std::vector<int> result(static_cast<std::size_t>(weights.rows()), -1);
  if (n == 0 || m == 0) return result;

  const double inf = std::numeric_limits<double>::infinity();
  // Potentials and matching over 1-based indices; column 0 is a sentinel.
  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
  std::vector<int> match(m + 1, 0), way(m + 1, 0);
  for (int i = 1; i <= n; ++i) {
    match[0] = i;
    int j0 = 0;
    std::vector<double> minv(m + 1, inf);
    std::vector<char> used(m + 1, false);
    do {
      used[j0] = true;
      const int i0 = match[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
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
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      const int j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  for (int j = 1; j <= m; ++j) {
    if (match[j] == 0) continue;
    const int row = match[j] - 1;
    const int col = j - 1;
    if (transposed) {
      result[static_cast<std::size_t>(col)] = row;
    } else {
      result[static_cast<std::size_t>(row)] = col;
    }
  }
  return result;
}

double max_weight_total(const Eigen::MatrixXd& weights) {
  const auto assignment = max_weight_assignment(weights);
  double total = 0.0;
  for (std::size_t r = 0; r < assignment.size(); ++r) {
    if (assignment[r] >= 0) total += weights(static_cast<Eigen::Index>(r), assignment[r]);
  }
  return total;
}

}  // namespace coref
