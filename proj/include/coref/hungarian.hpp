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

#pragma once

#include <vector>

#include <Eigen/Core>

namespace coref {

// Maximum-weight one-to-one assignment between the rows and columns of a
// (possibly rectangular) weight matrix, by the Hungarian method in
// O(n^2 m). Returns the matched column for every row, -1 if unmatched.
std::vector<int> max_weight_assignment(const Eigen::MatrixXd& weights);

// Total weight of the optimal assignment.
double max_weight_total(const Eigen::MatrixXd& weights);

}  // namespace coref
