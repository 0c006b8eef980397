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

// Dense numeric kernels shared by the graph ops and by test oracles.
// Everything here is templated on the scalar / Eigen expression type.

#include <cmath>
#include <limits>

#include <Eigen/Core>

#include "coref/error.hpp"

namespace coref::nn {

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using RowVectorX = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;

using Real = double;
using Matrix = MatrixX<Real>;
using Vector = VectorX<Real>;
using RowVector = RowVectorX<Real>;
using Mask = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;
using IndexVector = std::vector<Eigen::Index>;

template <typename Scalar>
Scalar sigmoid(Scalar x) {
  return Scalar(1) / (Scalar(1) + std::exp(-x));
}

// log(sum_i exp(row_i)) over the entries where mask is true.
template <typename RowDerived, typename MaskDerived>
typename RowDerived::Scalar masked_log_sum_exp(const Eigen::DenseBase<RowDerived>& row,
                                               const Eigen::DenseBase<MaskDerived>& mask) {
  using Scalar = typename RowDerived::Scalar;
  Scalar m = -std::numeric_limits<Scalar>::infinity();
  for (Eigen::Index i = 0; i < row.size(); ++i) {
    if (mask(i)) m = std::max(m, row(i));
  }
  if (!std::isfinite(m)) throw NumericError("log-sum-exp over an all-masked row");
  Scalar s = 0;
  for (Eigen::Index i = 0; i < row.size(); ++i) {
    if (mask(i)) s += std::exp(row(i) - m);
  }
  return m + std::log(s);
}

// Softmax over the unmasked entries; masked entries are exactly zero.
// Uses max subtraction.
template <typename RowDerived, typename MaskDerived>
RowVectorX<typename RowDerived::Scalar> masked_softmax(
    const Eigen::DenseBase<RowDerived>& row, const Eigen::DenseBase<MaskDerived>& mask) {
  using Scalar = typename RowDerived::Scalar;
  Scalar m = -std::numeric_limits<Scalar>::infinity();
  for (Eigen::Index i = 0; i < row.size(); ++i) {
    if (mask(i)) m = std::max(m, row(i));
  }
  if (!std::isfinite(m)) throw NumericError("softmax over an all-masked row");
  RowVectorX<Scalar> out = RowVectorX<Scalar>::Zero(row.size());
  Scalar total = 0;
  for (Eigen::Index i = 0; i < row.size(); ++i) {
    if (mask(i)) {
      out(i) = std::exp(row(i) - m);
      total += out(i);
    }
  }
  return out / total;
}

template <typename Derived>
RowVectorX<typename Derived::Scalar> softmax(const Eigen::DenseBase<Derived>& row) {
  return masked_softmax(row, Eigen::Array<bool, 1, Eigen::Dynamic>::Constant(row.size(), true));
}

// f * g + (1 - f) * a, elementwise and written out literally so that
// f == 1 reproduces g bit for bit.
template <typename F, typename G, typename A>
MatrixX<typename F::Scalar> gate_mix(const Eigen::MatrixBase<F>& f,
                                      const Eigen::MatrixBase<G>& g,
                                      const Eigen::MatrixBase<A>& a) {
  using Scalar = typename F::Scalar;
  if (f.rows() != g.rows() || f.cols() != g.cols() || g.rows() != a.rows() ||
      g.cols() != a.cols()) {
    throw DimensionError("gate_mix: shape mismatch");
  }
  return (f.array() * g.array() + (Scalar(1) - f.array()) * a.array()).matrix();
}

template <typename Scalar>
Scalar glorot_limit(Eigen::Index fan_in, Eigen::Index fan_out) {
  return std::sqrt(Scalar(6) / static_cast<Scalar>(fan_in + fan_out));
}

}  // namespace coref::nn
