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

#include <cstddef>
#include <deque>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "coref/nn/math.hpp"

namespace coref::nn {

struct Parameter {
  enum class Init { kGlorot, kZero };

  std::string name;
  int group = 0;  // optimizer group: 0 task, 1 encoder
  Init init = Init::kGlorot;
  Matrix value;
  Matrix grad;
};

// Owns parameters at stable addresses, in registration order.
class ParameterStore {
 public:
  Parameter& add(std::string name, Eigen::Index rows, Eigen::Index cols,
                 Parameter::Init init = Parameter::Init::kGlorot, int group = 0);

  Parameter* find(const std::string& name);
  const Parameter* find(const std::string& name) const;

  void zero_grad();
  void initialize(std::uint64_t seed);
  std::size_t num_scalars() const;
  std::size_t size() const { return params_.size(); }

  auto begin() { return params_.begin(); }
  auto end() { return params_.end(); }
  auto begin() const { return params_.cbegin(); }
  auto end() const { return params_.cend(); }

 private:
  std::vector<std::unique_ptr<Parameter>> params_;
  std::unordered_map<std::string, Parameter*> by_name_;
};

class Graph;

// Handle to a node in a Graph. Cheap to copy; only valid while the graph
// lives.
class Var {
 public:
  Var() = default;

  const Matrix& value() const;
  Eigen::Index rows() const { return value().rows(); }
  Eigen::Index cols() const { return value().cols(); }
  Real scalar() const { return value()(0, 0); }
  Graph& graph() const { return *graph_; }
  int id() const { return id_; }
  bool valid() const { return graph_ != nullptr; }

 private:
  friend class Graph;
  Var(Graph* g, int id) : graph_(g), id_(id) {}

  Graph* graph_ = nullptr;
  int id_ = -1;
};

// Reverse-mode tape. Nodes are evaluated eagerly on creation; backward()
// walks them in reverse creation order. A graph built with record=false
// keeps values only, for inference.
class Graph {
 public:
  using Backward = std::function<void(Graph&, const Matrix& out_grad)>;

  explicit Graph(bool record = true) : record_(record) {}
  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;

  Var constant(Matrix value);
  // One node per parameter per graph. Gradients land in Parameter::grad
  // when backward() runs.
  Var param(Parameter& p);

  // Creates a node from an already computed value. Inputs determine
  // whether the node participates in backward. Throws NumericError on
  // non-finite values.
  Var make(Matrix value, std::initializer_list<Var> inputs, Backward backward);
  Var make(Matrix value, std::span<const Var> inputs, Backward backward);

  const Matrix& value(Var v) const { return nodes_[v.id_].value; }
  bool needs_grad(Var v) const { return nodes_[v.id_].needs_grad; }

  template <typename Expr>
  void add_grad(Var v, const Expr& g) {
    Node& n = nodes_[v.id_];
    if (!n.needs_grad) return;
    if (n.grad.size() == 0) {
      n.grad = g;
    } else {
      n.grad += g;
    }
  }

  // Mutable gradient buffer, zero-initialized on first access.
  Matrix& grad_buffer(Var v);

  // Seeds d(loss)/d(loss) = 1 for a 1x1 loss and propagates to all
  // parameters reachable from it.
  void backward(Var loss);

  bool recording() const { return record_; }
  std::size_t num_nodes() const { return nodes_.size(); }
  // Scalar entries held by non-parameter node values created so far.
  std::size_t allocated() const { return allocated_; }

 private:
  struct Node {
    Matrix value;
    Matrix grad;
    Backward backward;
    bool needs_grad = false;
    Parameter* param = nullptr;
  };

  // A deque keeps node values at stable addresses as the tape grows, so
  // references from Var::value() stay valid for the life of the graph.
  std::deque<Node> nodes_;
  std::unordered_map<const Parameter*, int> param_nodes_;
  bool record_;
  std::size_t allocated_ = 0;
};

inline const Matrix& Var::value() const { return graph_->value(*this); }

}  // namespace coref::nn
