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

#include "coref/hoi.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <numeric>

#include "coref/buckets.hpp"
#include "coref/error.hpp"

namespace coref {

HoiMethod parse_hoi_method(const std::string& s) {
  if (s == "none") return HoiMethod::kNone;
  if (s == "aa") return HoiMethod::kAttendedAntecedent;
  if (s == "ee") return HoiMethod::kEntityEqualization;
  if (s == "sc") return HoiMethod::kSpanClustering;
  if (s == "cm") return HoiMethod::kClusterMerging;
  throw ArgumentError("unknown hoi.method '" + s + "' (expected none|aa|ee|sc|cm)");
}

std::string to_string(HoiMethod m) {
  switch (m) {
    case HoiMethod::kNone: return "none";
    case HoiMethod::kAttendedAntecedent: return "aa";
    case HoiMethod::kEntityEqualization: return "ee";
    case HoiMethod::kSpanClustering: return "sc";
    case HoiMethod::kClusterMerging: return "cm";
  }
  return "none";
}

CmOrder parse_cm_order(const std::string& s) {
  if (s == "sequential") return CmOrder::kSequential;
  if (s == "easy_first") return CmOrder::kEasyFirst;
  throw ArgumentError("unknown cm.order '" + s + "' (expected sequential|easy_first)");
}

std::string to_string(CmOrder o) { return o == CmOrder::kSequential ? "sequential" : "easy_first"; }

CmReduce parse_cm_reduce(const std::string& s) {
  if (s == "mean") return CmReduce::kMean;
  if (s == "max") return CmReduce::kMax;
  throw ArgumentError("unknown cm.reduce '" + s + "' (expected mean|max)");
}

std::string to_string(CmReduce r) { return r == CmReduce::kMean ? "mean" : "max"; }

nn::Var attend_antecedents(nn::Var reprs, nn::Var distribution, const AntecedentFrame& frame) {
  const nn::Matrix& g = reprs.value();
  const nn::Matrix& p = distribution.value();
  if (g.rows() != frame.size() || p.rows() != frame.size() || p.cols() != frame.columns()) {
    throw DimensionError("attend_antecedents: shapes do not match the frame");
  }
  nn::Matrix out(g.rows(), g.cols());
  for (int x = 0; x < frame.size(); ++x) {
    out.row(x) = p(x, 0) * g.row(x);
    const auto& cands = frame.candidates[x];
    for (int k = 0; k < static_cast<int>(cands.size()); ++k) out.row(x) += p(x, k + 1) * g.row(cands[k]);
  }
  return reprs.graph().make(std::move(out), {reprs, distribution},
                            [reprs, distribution, candidates = frame.candidates](
                                nn::Graph& gr, const nn::Matrix& d) {
    const nn::Matrix& g = reprs.value();
    const nn::Matrix& p = distribution.value();
    const bool need_g = gr.needs_grad(reprs);
    const bool need_p = gr.needs_grad(distribution);
    nn::Matrix dp = nn::Matrix::Zero(p.rows(), p.cols());
    for (int x = 0; x < static_cast<int>(candidates.size()); ++x) {
      const auto& cands = candidates[x];
      if (need_g) gr.grad_buffer(reprs).row(x) += p(x, 0) * d.row(x);
      dp(x, 0) = d.row(x).dot(g.row(x));
      for (int k = 0; k < static_cast<int>(cands.size()); ++k) {
        if (need_g) gr.grad_buffer(reprs).row(cands[k]) += p(x, k + 1) * d.row(x);
        dp(x, k + 1) = d.row(x).dot(g.row(cands[k]));
      }
    }
    if (need_p) gr.add_grad(distribution, dp);
  });
}

nn::Var entity_membership(nn::Var distribution, const AntecedentFrame& frame) {
  const nn::Matrix& p = distribution.value();
  const int n = frame.size();
  if (p.rows() != n || p.cols() != frame.columns()) {
    throw DimensionError("entity_membership: distribution does not match the frame");
  }
  nn::Matrix q = nn::Matrix::Zero(n, n);
  for (int x = 0; x < n; ++x) {
    q(x, x) = p(x, 0);
    const auto& cands = frame.candidates[x];
    for (int k = 0; k < static_cast<int>(cands.size()); ++k) {
      const int y = cands[k];
      q.row(x).head(y + 1) += p(x, k + 1) * q.row(y).head(y + 1);
    }
  }
  nn::Matrix saved = q;
  return distribution.graph().make(
      std::move(q), {distribution},
      [distribution, candidates = frame.candidates, q = std::move(saved)](nn::Graph& g,
                                                                          const nn::Matrix& d) {
        const nn::Matrix& p = distribution.value();
        const int n = static_cast<int>(candidates.size());
        // Rows are finished in reverse order: row x only feeds rows > x.
        nn::Matrix dq = d;
        nn::Matrix dp = nn::Matrix::Zero(p.rows(), p.cols());
        for (int x = n - 1; x >= 0; --x) {
          dp(x, 0) += dq(x, x);
          const auto& cands = candidates[x];
          for (int k = 0; k < static_cast<int>(cands.size()); ++k) {
            const int y = cands[k];
            dp(x, k + 1) += dq.row(x).head(y + 1).dot(q.row(y).head(y + 1));
            dq.row(y).head(y + 1) += p(x, k + 1) * dq.row(x).head(y + 1);
          }
        }
        g.add_grad(distribution, dp);
      });
}

nn::Var attend_entities(nn::Var reprs, nn::Var membership) {
  if (membership.rows() != reprs.rows() || membership.cols() != reprs.rows()) {
    throw DimensionError("attend_entities: membership must be N x N");
  }
  nn::Var weights = nn::lower_triangle(nn::matmul(membership, nn::transpose(membership)));
  return nn::matmul(weights, reprs);
}

nn::Var cluster_attention(nn::Var reprs, nn::Var logits, const std::vector<int>& cluster_ids) {
  const nn::Matrix& g = reprs.value();
  const nn::Matrix& s = logits.value();
  const auto n = static_cast<Eigen::Index>(cluster_ids.size());
  if (g.rows() != n || s.rows() != n || s.cols() != 1) {
    throw DimensionError("cluster_attention: one logit and one cluster id per span");
  }
  std::map<int, std::vector<int>> members;
  for (int x = 0; x < static_cast<int>(n); ++x) members[cluster_ids[x]].push_back(x);

  std::vector<std::vector<int>> groups;
  std::vector<nn::Vector> weights;
  nn::Matrix entity(static_cast<Eigen::Index>(members.size()), g.cols());
  std::vector<int> group_of(cluster_ids.size());
  for (auto& [id, m] : members) {
    nn::RowVector z(static_cast<Eigen::Index>(m.size()));
    for (std::size_t i = 0; i < m.size(); ++i) z(static_cast<Eigen::Index>(i)) = s(m[i], 0);
    nn::Vector alpha = nn::softmax(z).transpose();
    const auto gi = static_cast<Eigen::Index>(groups.size());
    entity.row(gi).setZero();
    for (std::size_t i = 0; i < m.size(); ++i) {
      entity.row(gi) += alpha(static_cast<Eigen::Index>(i)) * g.row(m[i]);
      group_of[m[i]] = static_cast<int>(gi);
    }
    groups.push_back(std::move(m));
    weights.push_back(std::move(alpha));
  }
  nn::Matrix out(n, g.cols());
  for (Eigen::Index x = 0; x < n; ++x) out.row(x) = entity.row(group_of[x]);

  return reprs.graph().make(
      std::move(out), {reprs, logits},
      [reprs, logits, groups = std::move(groups), weights = std::move(weights),
       entity = std::move(entity)](nn::Graph& gr, const nn::Matrix& d) {
        const nn::Matrix& g = reprs.value();
        const bool need_g = gr.needs_grad(reprs);
        const bool need_s = gr.needs_grad(logits);
        for (std::size_t c = 0; c < groups.size(); ++c) {
          nn::RowVector dc = nn::RowVector::Zero(g.cols());
          for (int x : groups[c]) dc += d.row(x);
          const nn::Real base = dc.dot(entity.row(static_cast<Eigen::Index>(c)));
          for (std::size_t i = 0; i < groups[c].size(); ++i) {
            const int t = groups[c][i];
            const nn::Real a = weights[c](static_cast<Eigen::Index>(i));
            if (need_g) gr.grad_buffer(reprs).row(t) += a * dc;
            if (need_s) gr.grad_buffer(logits)(t, 0) += a * (dc.dot(g.row(t)) - base);
          }
        }
      });
}

nn::Var reduce_groups(nn::Var reprs, const std::vector<std::vector<int>>& groups, CmReduce mode) {
  const nn::Matrix& g = reprs.value();
  nn::Matrix out(static_cast<Eigen::Index>(groups.size()), g.cols());
  // For max: the member index that supplied each output entry.
  std::vector<std::vector<int>> argmax(groups.size());
  for (std::size_t c = 0; c < groups.size(); ++c) {
    const auto& m = groups[c];
    if (m.empty()) throw DimensionError("reduce_groups: empty group");
    const auto row = static_cast<Eigen::Index>(c);
    if (mode == CmReduce::kMean) {
      out.row(row).setZero();
      for (int t : m) out.row(row) += g.row(t);
      out.row(row) /= static_cast<nn::Real>(m.size());
    } else {
      argmax[c].assign(static_cast<std::size_t>(g.cols()), m.front());
      out.row(row) = g.row(m.front());
      for (std::size_t i = 1; i < m.size(); ++i) {
        for (Eigen::Index j = 0; j < g.cols(); ++j) {
          if (g(m[i], j) > out(row, j)) {
            out(row, j) = g(m[i], j);
            argmax[c][static_cast<std::size_t>(j)] = m[i];
          }
        }
      }
    }
  }
  return reprs.graph().make(std::move(out), {reprs},
                            [reprs, groups, mode, argmax = std::move(argmax)](nn::Graph& gr,
                                                                            const nn::Matrix& d) {
    nn::Matrix& dg = gr.grad_buffer(reprs);
    for (std::size_t c = 0; c < groups.size(); ++c) {
      const auto row = static_cast<Eigen::Index>(c);
      if (mode == CmReduce::kMean) {
        const nn::Real w = 1.0 / static_cast<nn::Real>(groups[c].size());
        for (int t : groups[c]) dg.row(t) += w * d.row(row);
      } else {
        for (Eigen::Index j = 0; j < d.cols(); ++j) dg(argmax[c][static_cast<std::size_t>(j)], j) += d(row, j);
      }
    }
  });
}

ClusterState::ClusterState(int n) : cluster_of_(n), members_(n), num_clusters_(n) {
  for (int i = 0; i < n; ++i) {
    cluster_of_[i] = i;
    members_[i] = {i};
  }
}

bool ClusterState::merge(int a, int b) {
  int ca = cluster_of_[a];
  int cb = cluster_of_[b];
  if (ca == cb) return false;
  if (members_[ca].size() < members_[cb].size()) std::swap(ca, cb);
  for (int t : members_[cb]) cluster_of_[t] = ca;
  members_[ca].insert(members_[ca].end(), members_[cb].begin(), members_[cb].end());
  std::sort(members_[ca].begin(), members_[ca].end());
  members_[cb].clear();
  --num_clusters_;
  return true;
}

std::vector<int> ClusterState::assignment() const {
  std::vector<int> ids(cluster_of_.size(), -1);
  std::map<int, int> renumber;
  for (std::size_t x = 0; x < cluster_of_.size(); ++x) {
    auto [it, _] = renumber.emplace(cluster_of_[x], static_cast<int>(renumber.size()));
    ids[x] = it->second;
  }
  return ids;
}

ClusterScorer::ClusterScorer(nn::ParameterStore& store, int span_dim, int feature_dim,
                             const std::vector<int>& hidden)
    : ffnn_(store, "cluster", 3 * span_dim + feature_dim, hidden, 1),
      size_(store, "cluster.size_emb", kNumClusterSizeBuckets, feature_dim) {}

nn::Var ClusterScorer::score(nn::Graph& g, nn::Var span_rows, nn::Var cluster_rows,
                             const nn::IndexVector& size_buckets,
                             const nn::DropoutContext& dropout) const {
  nn::Var input = nn::concat_cols({span_rows, cluster_rows, nn::mul(span_rows, cluster_rows),
                                   size_.lookup(g, size_buckets)});
  return ffnn_.forward(g, input, dropout);
}

std::vector<int> ranking_order(const nn::Matrix& base_scores, const AntecedentFrame& frame,
                               CmOrder order) {
  std::vector<int> r(frame.size());
  std::iota(r.begin(), r.end(), 0);
  if (order == CmOrder::kSequential) return r;
  std::vector<double> key(frame.size(), -std::numeric_limits<double>::infinity());
  for (int x = 0; x < frame.size(); ++x) {
    const int k = static_cast<int>(frame.candidates[x].size());
    if (k > 0) key[x] = base_scores.row(x).segment(1, k).maxCoeff();
  }
  std::stable_sort(r.begin(), r.end(), [&](int a, int b) { return key[a] > key[b]; });
  return r;
}

CmResult rank_cm(nn::Var reprs, nn::Var base_scores, const AntecedentFrame& frame,
                 const ClusterScorer& scorer, CmOrder order, CmReduce reduce,
                 const nn::DropoutContext& dropout) {
  nn::Graph& g = reprs.graph();
  const nn::Matrix& base = base_scores.value();
  if (base.rows() != frame.size() || base.cols() != frame.columns()) {
    throw DimensionError("rank_cm: base scores do not match the frame");
  }
  CmResult result{base_scores, ClusterState(frame.size()), ranking_order(base, frame, order),
                  std::vector<int>(frame.size(), -1)};
  std::vector<nn::Var> contributions;
  nn::IndexVector rows, cols;

  for (int x : result.order) {
    const auto& cands = frame.candidates[x];
    std::vector<int> fc_columns;
    std::vector<std::vector<int>> groups;
    nn::IndexVector sizes;
    for (int k = 0; k < static_cast<int>(cands.size()); ++k) {
      const int y = cands[k];
      if (result.clusters.is_initial(y)) continue;  // f_c = 0 for initial clusters
      const auto& members = result.clusters.members(result.clusters.cluster_of(y));
      fc_columns.push_back(k + 1);
      groups.push_back(members);
      sizes.push_back(cluster_size_bucket(static_cast<long>(members.size())));
    }
    nn::Matrix fc_values;
    if (!groups.empty()) {
      nn::Var span_rows = nn::gather_rows(reprs, nn::IndexVector(groups.size(), x));
      nn::Var cluster_rows = reduce_groups(reprs, groups, reduce);
      nn::Var fc = scorer.score(g, span_rows, cluster_rows, sizes, dropout);
      fc_values = fc.value();
      contributions.push_back(fc);
      for (int c : fc_columns) {
        rows.push_back(x);
        cols.push_back(c);
      }
    }
    // Same arithmetic as base + scatter(f_c) below, so the decision agrees
    // with the returned score row.
    double best = base(x, 0);
    int choice = -1;
    std::size_t j = 0;
    for (int k = 0; k < static_cast<int>(cands.size()); ++k) {
      double s = base(x, k + 1);
      if (j < fc_columns.size() && fc_columns[j] == k + 1) {
        s = base(x, k + 1) + (0.0 + fc_values(static_cast<Eigen::Index>(j), 0));
        ++j;
      } else {
        s = base(x, k + 1) + 0.0;
      }
      if (s > best) {
        best = s;
        choice = cands[k];
      }
    }
    result.antecedents[x] = choice;
    if (choice >= 0) result.clusters.merge(x, choice);
  }

  if (!contributions.empty()) {
    nn::Var fc_all = nn::concat_rows(contributions);
    result.scores = base_scores + nn::scatter(fc_all, rows, cols, frame.size(), frame.columns());
  }
  return result;
}

}  // namespace coref
