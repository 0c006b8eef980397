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

#include <string>
#include <vector>

#include "coref/nn/ops.hpp"

namespace coref::nn {

// Dropout settings for one forward pass. Evaluation passes use the
// default (identity).
struct DropoutContext {
  Real rate = 0.0;
  Rng* rng = nullptr;

  bool active() const { return rate > 0.0 && rng != nullptr; }
  Var apply(Var x) const { return active() ? dropout(x, rate, *rng) : x; }
};

// Rectifier feedforward network with a linear output head.
class Ffnn {
 public:
  Ffnn() = default;
  Ffnn(ParameterStore& store, const std::string& name, int input_dim,
       const std::vector<int>& hidden, int output_dim, int group = 0);

  Var forward(Graph& g, Var x, const DropoutContext& dropout = {}) const;

  int input_dim() const { return input_dim_; }
  int output_dim() const { return output_dim_; }

  // Zeroes the output head so that the network outputs exactly 0.
  void zero_output() const;

  const std::vector<Parameter*>& weights() const { return weights_; }
  const std::vector<Parameter*>& biases() const { return biases_; }

 private:
  int input_dim_ = 0;
  int output_dim_ = 0;
  std::vector<Parameter*> weights_;
  std::vector<Parameter*> biases_;
};

// f = sigmoid([g, a] W + b); output f * g + (1 - f) * a.
class Gate {
 public:
  Gate() = default;
  Gate(ParameterStore& store, const std::string& name, int dim, int group = 0);

  Var gate_values(Graph& g, Var current, Var refined) const;
  Var forward(Graph& g, Var current, Var refined) const;

  // Sets W = 0 and a saturating bias so that f is 1 (keep) or ~0 (replace).
  void force(bool keep) const;

  int dim() const { return dim_; }

 private:
  int dim_ = 0;
  Parameter* weight_ = nullptr;
  Parameter* bias_ = nullptr;
};

class EmbeddingTable {
 public:
  EmbeddingTable() = default;
  EmbeddingTable(ParameterStore& store, const std::string& name, int vocab, int dim, int group = 0);

  Var lookup(Graph& g, const IndexVector& ids) const;
  int dim() const { return dim_; }
  int vocab() const { return vocab_; }

 private:
  int vocab_ = 0;
  int dim_ = 0;
  Parameter* table_ = nullptr;
};

}  // namespace coref::nn
