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

#include <functional>
#include <string>

#include "coref/nn/graph.hpp"

namespace coref::nn {

struct GradCheckOptions {
  Real step = 1e-5;
  // Entries sampled per parameter; 0 checks every entry.
  std::size_t max_entries_per_param = 0;
  // Denominator floor for the relative error, so entries whose analytic and
  // numeric gradients are both ~0 compare on absolute error.
  Real denominator_floor = 1e-6;
  std::uint64_t seed = 0;
};

struct GradCheckResult {
  Real max_relative_error = 0.0;
  std::string worst_entry;
  std::size_t checked = 0;
};

// Compares analytic gradients of loss_fn with central finite differences.
// loss_fn must build a fresh graph each time and be a deterministic
// function of the parameter values.
GradCheckResult check_gradients(ParameterStore& store,
                                const std::function<Var(Graph&)>& loss_fn,
                                const GradCheckOptions& options = {});

}  // namespace coref::nn
