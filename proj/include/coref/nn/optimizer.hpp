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

#include <array>
#include <vector>

#include "coref/nn/graph.hpp"

namespace coref::nn {

struct GroupConfig {
  Real learning_rate = 3e-4;
  Real weight_decay = 0.0;
};

struct OptimizerConfig {
  // Group 0 holds task parameters, group 1 encoder parameters.
  std::array<GroupConfig, 2> groups = {GroupConfig{3e-4, 0.0}, GroupConfig{1e-5, 1e-2}};
  Real beta1 = 0.9;
  Real beta2 = 0.999;
  Real epsilon = 1e-8;
  // Linear decay from the base rate to 0 at this step; 0 disables decay.
  long total_steps = 0;
  // Global gradient-norm clip; 0 disables clipping.
  Real clip_norm = 0.0;
};

struct OptimizerState {
  long step = 0;
  std::vector<Matrix> first_moment;
  std::vector<Matrix> second_moment;
};

// Linear decay multiplier for the given (1-based) step.
Real linear_decay(long step, long total_steps);

// Adaptive-moment optimizer with bias correction and decoupled weight
// decay, per parameter group.
class Adam {
 public:
  explicit Adam(OptimizerConfig config = {}) : config_(config) {}

  void init(const ParameterStore& store);

  // Applies one update from the gradients held in the store. Throws
  // NumericError on a non-finite gradient. Returns the pre-clip global
  // gradient norm.
  Real step(ParameterStore& store);

  Real effective_rate(int group) const;

  const OptimizerConfig& config() const { return config_; }
  OptimizerState& state() { return state_; }
  const OptimizerState& state() const { return state_; }

 private:
  OptimizerConfig config_;
  OptimizerState state_;
};

}  // namespace coref::nn
