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

#include "coref/nn/optimizer.hpp"

#include <cmath>

#include "coref/error.hpp"

namespace coref::nn {

Real linear_decay(long step, long total_steps) {
  if (total_steps <= 0) return 1.0;
  const Real remaining = static_cast<Real>(total_steps - step) / static_cast<Real>(total_steps);
  return std::max<Real>(0.0, remaining);
}

void Adam::init(const ParameterStore& store) {
  state_.step = 0;
  state_.first_moment.clear();
  state_.second_moment.clear();
  for (const auto& p : store) {
    state_.first_moment.push_back(Matrix::Zero(p->value.rows(), p->value.cols()));
    state_.second_moment.push_back(Matrix::Zero(p->value.rows(), p->value.cols()));
  }
}

Real Adam::effective_rate(int group) const {
  return config_.groups.at(group).learning_rate * linear_decay(state_.step, config_.total_steps);
}

Real Adam::step(ParameterStore& store) {
  if (state_.first_moment.size() != store.size()) init(store);

  Real sq = 0.0;
  for (const auto& p : store) {
    if (!p->grad.allFinite()) throw NumericError("non-finite gradient for " + p->name);
    sq += p->grad.squaredNorm();
  }
  const Real norm = std::sqrt(sq);
  const Real clip = (config_.clip_norm > 0.0 && norm > config_.clip_norm)
                        ? config_.clip_norm / norm
                        : 1.0;

  ++state_.step;
  const Real t = static_cast<Real>(state_.step);
  const Real bc1 = 1.0 - std::pow(config_.beta1, t);
  const Real bc2 = 1.0 - std::pow(config_.beta2, t);
  const Real decay = linear_decay(state_.step, config_.total_steps);

  std::size_t i = 0;
  for (auto& p : store) {
    const GroupConfig& group = config_.groups.at(p->group);
    const Real lr = group.learning_rate * decay;
    Matrix& m = state_.first_moment[i];
    Matrix& v = state_.second_moment[i];
    ++i;
    const Matrix grad = p->grad * clip;
    m = config_.beta1 * m + (1.0 - config_.beta1) * grad;
    v = config_.beta2 * v + (1.0 - config_.beta2) * grad.cwiseAbs2();
    if (lr == 0.0) continue;
    if (group.weight_decay != 0.0) p->value *= (1.0 - lr * group.weight_decay);
    p->value.array() -= lr * (m.array() / bc1) / ((v.array() / bc2).sqrt() + config_.epsilon);
  }
  return norm;
}

}  // namespace coref::nn
