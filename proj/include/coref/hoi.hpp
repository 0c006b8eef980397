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

#include "coref/nn/layers.hpp"
#include "coref/ranker.hpp"

namespace coref {

enum class HoiMethod { kNone, kAttendedAntecedent, kEntityEqualization, kSpanClustering, kClusterMerging };
enum class CmOrder { kSequential, kEasyFirst };
enum class CmReduce { kMean, kMax };

HoiMethod parse_hoi_method(const std::string& s);
std::string to_string(HoiMethod m);
CmOrder parse_cm_order(const std::string& s);
std::string to_string(CmOrder o);
CmReduce parse_cm_reduce(const std::string& s);
std::string to_string(CmReduce r);

struct HoiConfig {
  HoiMethod method = HoiMethod::kNone;
  int rounds = 1;
  CmOrder cm_order = CmOrder::kSequential;
  CmReduce cm_reduce = CmReduce::kMax;
  int ee_max_spans = 300;
};

// Attended antecedent: a_x = P(eps) g_x + sum_k P(k) g_{cand(x, k)}.
// The dummy share attends to the span itself.
nn::Var attend_antecedents(nn::Var reprs, nn::Var distribution, const AntecedentFrame& frame);

// Soft entity membership Q (N x N, lower triangular):
//   Q[x][y'] = sum_{k in cand(x)} P(x, k) Q[k][y']  for y' < x
//   Q[x][x]  = P(x, eps)
// Antecedents outside the candidate list carry zero mass; rows still sum
// to one because every candidate row does.
nn::Var entity_membership(nn::Var distribution, const AntecedentFrame& frame);

// a_x = sum_{y <= x} Q[x][y] e_y^(x) with e_y^(x) = sum_{z <= x} Q[z][y] g_z,
// i.e. a = tril(Q Q^T) G.
nn::Var attend_entities(nn::Var reprs, nn::Var membership);

// Per-cluster softmax attention over member representations; every
// member of cluster i receives e_i.
nn::Var cluster_attention(nn::Var reprs, nn::Var logits, const std::vector<int>& cluster_ids);

// One row per group: elementwise mean or max of the member rows.
nn::Var reduce_groups(nn::Var reprs, const std::vector<std::vector<int>>& groups, CmReduce mode);

// Hard clusters over span indices, starting from singletons.
class ClusterState {
 public:
  explicit ClusterState(int n = 0);

  int cluster_of(int span) const { return cluster_of_[span]; }
  const std::vector<int>& members(int cluster) const { return members_[cluster]; }
  bool is_initial(int span) const { return members_[cluster_of_[span]].size() == 1; }
  // Merges the clusters of a and b; returns false if already together.
  bool merge(int a, int b);
  int num_clusters() const { return num_clusters_; }
  int size() const { return static_cast<int>(cluster_of_.size()); }
  // Cluster id per span, numbered by first member.
  std::vector<int> assignment() const;

 private:
  std::vector<int> cluster_of_;
  std::vector<std::vector<int>> members_;
  int num_clusters_ = 0;
};

// f_c(g_x, C, phi(C)) over [g_x; e_C; g_x * e_C; size embedding].
class ClusterScorer {
 public:
  ClusterScorer() = default;
  ClusterScorer(nn::ParameterStore& store, int span_dim, int feature_dim,
                const std::vector<int>& hidden);

  nn::Var score(nn::Graph& g, nn::Var span_rows, nn::Var cluster_rows,
                const nn::IndexVector& size_buckets, const nn::DropoutContext& dropout = {}) const;

  const nn::Ffnn& ffnn() const { return ffnn_; }

 private:
  nn::Ffnn ffnn_;
  nn::EmbeddingTable size_;
};

struct CmResult {
  nn::Var scores;  // N x (K + 1) final score rows
  ClusterState clusters;
  std::vector<int> order;        // visiting order
  std::vector<int> antecedents;  // decision per span, -1 for the dummy
};

// Sequential antecedent ranking with cluster merging. Each visited span
// scores its candidates with base + f_c, where f_c is 0 for clusters that
// are still initial singletons; the argmax (ties toward the dummy, then
// the nearest candidate) is merged in.
CmResult rank_cm(nn::Var reprs, nn::Var base_scores, const AntecedentFrame& frame,
                 const ClusterScorer& scorer, CmOrder order, CmReduce reduce,
                 const nn::DropoutContext& dropout = {});

// Visiting order: document order, or descending max candidate score with
// ties by span index (spans without candidates go last).
std::vector<int> ranking_order(const nn::Matrix& base_scores, const AntecedentFrame& frame,
                               CmOrder order);

}  // namespace coref
