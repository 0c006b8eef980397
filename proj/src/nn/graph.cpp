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

#include "coref/nn/graph.hpp"

#include "coref/error.hpp"
#include "coref/rng.hpp"

namespace coref::nn {

Parameter& ParameterStore::add(std::string name, Eigen::Index rows, Eigen::Index cols,
                               Parameter::Init init, int group) {
  if (by_name_.count(name)) throw ArgumentError("duplicate parameter name: " + name);
  auto p = std::make_unique<Parameter>();
  p->name = std::move(name);
  p->group = group;
  p->init = init;
  p->value = Matrix::Zero(rows, cols);
  p->grad = Matrix::Zero(rows, cols);
  Parameter& ref = *p;
  by_name_[ref.name] = &ref;
  params_.push_back(std::move(p));
  return ref;
}

Parameter* ParameterStore::find(const std::string& name) {
  auto it = by_name_.find(name);
  return it == by_name_.end() ? nullptr : it->second;
}

const Parameter* ParameterStore::find(const std::string& name) const {
  auto it = by_name_.find(name);
  return it == by_name_.end() ? nullptr : it->second;
}

void ParameterStore::zero_grad() {
  for (auto& p : params_) p->grad.setZero();
}

void ParameterStore::initialize(std::uint64_t seed) {
  for (auto& p : params_) {
    if (p->init == Parameter::Init::kZero) {
      p->value.setZero();
      continue;
    }
    // Each parameter draws from its own stream keyed by name, so adding a
    // module does not perturb the initialization of the others.
    Rng rng(mix64(seed ^ fnv1a(p->name)));
    const Real limit = glorot_limit<Real>(p->value.rows(), p->value.cols());
    for (Eigen::Index j = 0; j < p->value.cols(); ++j) {
      for (Eigen::Index i = 0; i < p->value.rows(); ++i) {
        p->value(i, j) = rng.uniform(-limit, limit);
      }
    }
  }
}

std::size_t ParameterStore::num_scalars() const {
  std::size_t n = 0;
  for (const auto& p : params_) n += static_cast<std::size_t>(p->value.size());
  return n;
}

Var Graph::constant(Matrix value) {
  if (!value.allFinite()) throw NumericError("non-finite constant");
  allocated_ += static_cast<std::size_t>(value.size());
  nodes_.push_back(Node{std::move(value), {}, {}, false, nullptr});
  return Var(this, static_cast<int>(nodes_.size()) - 1);
}

Var Graph::param(Parameter& p) {
  auto it = param_nodes_.find(&p);
  if (it != param_nodes_.end()) return Var(this, it->second);
  nodes_.push_back(Node{p.value, {}, {}, record_, &p});
  const int id = static_cast<int>(nodes_.size()) - 1;
  param_nodes_[&p] = id;
  return Var(this, id);
}

Var Graph::make(Matrix value, std::initializer_list<Var> inputs, Backward backward) {
  return make(std::move(value), std::span<const Var>(inputs.begin(), inputs.size()),
              std::move(backward));
}

Var Graph::make(Matrix value, std::span<const Var> inputs, Backward backward) {
  if (!value.allFinite()) throw NumericError("non-finite value produced by graph op");
  bool needs = false;
  if (record_) {
    for (const Var& in : inputs) {
      if (in.graph_ != this) throw ArgumentError("graph op mixes variables from different graphs");
      needs = needs || nodes_[in.id_].needs_grad;
    }
  }
  allocated_ += static_cast<std::size_t>(value.size());
  nodes_.push_back(Node{std::move(value), {}, needs ? std::move(backward) : Backward{}, needs,
                        nullptr});
  return Var(this, static_cast<int>(nodes_.size()) - 1);
}

Matrix& Graph::grad_buffer(Var v) {
  Node& n = nodes_[v.id_];
  if (n.grad.size() == 0) n.grad = Matrix::Zero(n.value.rows(), n.value.cols());
  return n.grad;
}

void Graph::backward(Var loss) {
  if (!record_) throw ArgumentError("backward() on a graph built without recording");
  if (loss.graph_ != this || value(loss).size() != 1) {
    throw DimensionError("backward() expects a 1x1 loss node of this graph");
  }
  if (!nodes_[loss.id_].needs_grad) return;
  nodes_[loss.id_].grad = Matrix::Ones(1, 1);
  for (int id = loss.id_; id >= 0; --id) {
    Node& n = nodes_[id];
    if (n.grad.size() == 0) continue;
    if (n.param != nullptr) {
      if (!n.grad.allFinite()) throw NumericError("non-finite gradient for " + n.param->name);
      n.param->grad += n.grad;
    } else if (n.backward) {
      // nodes_ does not grow during backward, so n.grad stays valid.
      n.backward(*this, n.grad);
    }
  }
}

}  // namespace coref::nn
