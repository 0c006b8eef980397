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

#include "coref/nn/graph.hpp"
#include "coref/rng.hpp"

namespace coref::nn {

Var matmul(Var a, Var b);
Var transpose(Var a);
Var add(Var a, Var b);
Var sub(Var a, Var b);
Var mul(Var a, Var b);  // elementwise
Var scale(Var a, Real s);
// a (n x c) plus a 1 x c row broadcast over rows.
Var add_row(Var a, Var row);
Var relu(Var a);
Var sigmoid(Var a);
// x W + b with x (n x in), W (in x out), b (1 x out).
Var linear(Var x, Var w, Var b);

// f * g + (1 - f) * a.
Var gate_mix(Var f, Var g, Var a);

Var concat_cols(const std::vector<Var>& parts);
Var concat_rows(const std::vector<Var>& parts);
Var gather_rows(Var a, const IndexVector& rows);

// Inverted dropout with a mask drawn from rng. Identity for rate 0.
Var dropout(Var a, Real rate, Rng& rng);

Var sum(Var a);

// Lower triangle including the diagonal; the rest is zeroed.
Var lower_triangle(Var a);

// Places values (n x 1) at (rows[i], cols[i]) of a zero rows x cols matrix.
Var scatter(Var values, const IndexVector& rows, const IndexVector& cols,
            Eigen::Index out_rows, Eigen::Index out_cols);

// Per-row log-sum-exp over entries where mask is true; result is n x 1.
Var row_log_sum_exp(Var scores, const Mask& mask);

// Per-row softmax over entries where mask is true; masked entries are 0.
Var row_softmax(Var scores, const Mask& mask);

inline Var operator+(Var a, Var b) { return add(a, b); }
inline Var operator-(Var a, Var b) { return sub(a, b); }

}  // namespace coref::nn
