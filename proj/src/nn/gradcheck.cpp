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

#include "coref/nn/gradcheck.hpp"

#include <cmath>
#include <numeric>

#include "coref/rng.hpp"

namespace coref::nn {

GradCheckResult check_gradients(ParameterStore& store,
                                const std::function<Var(Graph&)>& loss_fn,
                                const GradCheckOptions& options) {
  store.zero_grad();
  {
    Graph g;
    Var loss = loss_fn(g);
    g.backward(loss);
  }
  auto evaluate = [&]() {
    Graph g(false);
    return loss_fn(g).scalar();
  };

  GradCheckResult result;
  Rng rng(options.seed);
  for (auto& p : store) {
    const Eigen::Index n = p->value.size();
    std::vector<Eigen::Index> entries(static_cast<std::size_t>(n));
    std::iota(entries.begin(), entries.end(), Eigen::Index{0});
    if (options.max_entries_per_param > 0 &&
        entries.size() > options.max_entries_per_param) {
      for (std::size_t i = 0; i < options.max_entries_per_param; ++i) {
        std::swap(entries[i], entries[i + rng.below(entries.size() - i)]);
      }
      entries.resize(options.max_entries_per_param);
    }
    for (Eigen::Index k : entries) {
      Real& x = p->value.data()[k];
      const Real saved = x;
      x = saved + options.step;
      const Real plus = evaluate();
      x = saved - options.step;
      const Real minus = evaluate();
      x = saved;
      const Real numeric = (plus - minus) / (2.0 * options.step);
      const Real analytic = p->grad.data()[k];
      const Real denom =
          std::max({std::abs(numeric), std::abs(analytic), options.denominator_floor});
      const Real rel = std::abs(numeric - analytic) / denom;
      ++result.checked;
      if (rel > result.max_relative_error || !std::isfinite(rel)) {
        result.max_relative_error = rel;
        result.worst_entry = p->name + "[" + std::to_string(k) + "] analytic=" +
                             std::to_string(analytic) + " numeric=" + std::to_string(numeric);
      }
    }
  }
  return result;
}

}  // namespace coref::nn
