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

#include "coref/nn/layers.hpp"

#include "coref/error.hpp"

namespace coref::nn {

Ffnn::Ffnn(ParameterStore& store, const std::string& name, int input_dim,
           const std::vector<int>& hidden, int output_dim, int group)
    : input_dim_(input_dim), output_dim_(output_dim) {
  int in = input_dim;
  for (std::size_t i = 0; i < hidden.size(); ++i) {
    const std::string layer = name + ".hidden" + std::to_string(i);
    weights_.push_back(&store.add(layer + ".w", in, hidden[i], Parameter::Init::kGlorot, group));
    biases_.push_back(&store.add(layer + ".b", 1, hidden[i], Parameter::Init::kZero, group));
    in = hidden[i];
  }
  weights_.push_back(&store.add(name + ".out.w", in, output_dim, Parameter::Init::kGlorot, group));
  biases_.push_back(&store.add(name + ".out.b", 1, output_dim, Parameter::Init::kZero, group));
}

Var Ffnn::forward(Graph& g, Var x, const DropoutContext& dropout) const {
  if (x.cols() != input_dim_) {
    throw DimensionError("ffnn: input has " + std::to_string(x.cols()) + " columns, expected " +
                         std::to_string(input_dim_));
  }
  Var h = x;
  const std::size_t n_hidden = weights_.size() - 1;
  for (std::size_t i = 0; i < n_hidden; ++i) {
    h = relu(linear(h, g.param(*weights_[i]), g.param(*biases_[i])));
    h = dropout.apply(h);
  }
  return linear(h, g.param(*weights_.back()), g.param(*biases_.back()));
}

void Ffnn::zero_output() const {
  weights_.back()->value.setZero();
  biases_.back()->value.setZero();
}

Gate::Gate(ParameterStore& store, const std::string& name, int dim, int group) : dim_(dim) {
  weight_ = &store.add(name + ".w", 2 * dim, dim, Parameter::Init::kGlorot, group);
  bias_ = &store.add(name + ".b", 1, dim, Parameter::Init::kZero, group);
}

Var Gate::gate_values(Graph& g, Var current, Var refined) const {
  if (current.cols() != dim_ || refined.cols() != dim_ || current.rows() != refined.rows()) {
    throw DimensionError("gate: current and refined representations must both be n x " +
                         std::to_string(dim_));
  }
  return sigmoid(linear(concat_cols({current, refined}), g.param(*weight_), g.param(*bias_)));
}

Var Gate::forward(Graph& g, Var current, Var refined) const {
  return gate_mix(gate_values(g, current, refined), current, refined);
}

void Gate::force(bool keep) const {
  weight_->value.setZero();
  // sigmoid(50) rounds to exactly 1.0 in double precision.
  bias_->value.setConstant(keep ? 50.0 : -50.0);
}

EmbeddingTable::EmbeddingTable(ParameterStore& store, const std::string& name, int vocab, int dim,
                               int group)
    : vocab_(vocab), dim_(dim) {
  table_ = &store.add(name, vocab, dim, Parameter::Init::kGlorot, group);
}

Var EmbeddingTable::lookup(Graph& g, const IndexVector& ids) const {
  return gather_rows(g.param(*table_), ids);
}

}  // namespace coref::nn
