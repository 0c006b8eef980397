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

#include "coref/corpus.hpp"
#include "coref/nn/layers.hpp"

namespace coref {

struct SpanCandidateSet {
  std::vector<Span> spans;            // document order: by start, then end
  std::vector<double> mention_scores;  // parallel to spans once scored
};

// All intra-sentence spans of width <= max_width, in document order.
SpanCandidateSet enumerate_spans(const Document& doc, int max_width);

// Keeps the top min(ceil(ratio * num_tokens), cap) spans by mention score,
// accepting in score order and rejecting spans that cross an accepted span.
// Returns indices into set.spans, in document order.
std::vector<int> prune_spans(const SpanCandidateSet& set, double ratio, int num_tokens, int cap);

// Candidate antecedents for every kept span plus the dense layout of the
// score matrix: column 0 is the dummy antecedent, column k >= 1 holds
// candidates[x][k - 1]. Candidates are ordered nearest first.
struct AntecedentFrame {
  std::vector<Span> spans;
  std::vector<std::vector<int>> candidates;
  int max_candidates = 0;
  nn::Mask mask;  // N x (max_candidates + 1)

  // Flattened (anaphor, antecedent) pairs with their dense column.
  nn::IndexVector pair_anaphor;
  nn::IndexVector pair_antecedent;
  nn::IndexVector pair_column;

  int size() const { return static_cast<int>(spans.size()); }
  int columns() const { return max_candidates + 1; }

  // Builds mask and pair lists from spans and candidates.
  void finalize(int max_candidates_cap);
};

// Coarse score s_m(x) + s_m(y) + g_x^T W g_y; keeps the top max_antecedents
// preceding spans per anaphor (ties broken toward the nearer span).
AntecedentFrame select_antecedents(const std::vector<Span>& spans, const nn::Matrix& reprs,
                                   const nn::Vector& mention_scores,
                                   const nn::Matrix& coarse_weight, int max_antecedents);

// Per-pair meta-feature ids.
struct MetaFeatures {
  nn::IndexVector same_speaker;
  nn::IndexVector distance;
  nn::IndexVector genre;
  nn::IndexVector segment_distance;
};

inline constexpr int kNumGenres = 8;
// bc, bn, mz, nw, pt, tc, wb; anything else maps to the last id.
int genre_id(const std::string& genre);

MetaFeatures meta_features(const AntecedentFrame& frame, const std::vector<std::string>& speakers,
                           const std::string& genre, const std::vector<int>& segment_of_token);

class MentionScorer {
 public:
  MentionScorer() = default;
  MentionScorer(nn::ParameterStore& store, int span_dim, const std::vector<int>& hidden);

  nn::Var score(nn::Graph& g, nn::Var reprs, const nn::DropoutContext& dropout = {}) const;
  const nn::Ffnn& ffnn() const { return ffnn_; }

 private:
  nn::Ffnn ffnn_;
};

class PairScorer {
 public:
  PairScorer() = default;
  PairScorer(nn::ParameterStore& store, int span_dim, int feature_dim,
             const std::vector<int>& hidden);

  // s_c(x, y) for every pair of the frame, as a P x 1 column.
  nn::Var coref_scores(nn::Graph& g, nn::Var reprs, const AntecedentFrame& frame,
                       const MetaFeatures& features, const nn::DropoutContext& dropout = {}) const;

  const nn::Ffnn& ffnn() const { return ffnn_; }
  int feature_dim() const { return feature_dim_; }

 private:
  int feature_dim_ = 0;
  nn::Ffnn ffnn_;
  nn::EmbeddingTable speaker_;
  nn::EmbeddingTable distance_;
  nn::EmbeddingTable genre_;
  nn::EmbeddingTable segment_distance_;
};

// Dense N x (K + 1) score matrix s(x, y) = s_m(x) + s_m(y) + s_c(x, y)
// with the dummy column fixed at 0 and invalid cells at 0 (masked).
nn::Var antecedent_scores(nn::Var mention_scores, nn::Var coref_scores,
                          const AntecedentFrame& frame);

// Row-wise softmax over the candidates and the dummy antecedent.
nn::Matrix antecedent_distribution(const nn::Matrix& scores, const AntecedentFrame& frame);

// Argmax per span with ties broken toward the dummy, then the nearest
// candidate. Returns the chosen span index into frame.spans, or -1.
std::vector<int> best_antecedents(const nn::Matrix& scores, const AntecedentFrame& frame);

// Cluster id per span from antecedent links (transitive closure),
// singletons included, ids numbered by first member.
std::vector<int> link_clusters(const std::vector<int>& antecedents);

// Clusters of >= 2 mentions from antecedent links.
Clusters decode_clusters(const std::vector<int>& antecedents, const std::vector<Span>& spans);

// Gold cluster id per span, -1 for spans that are not gold mentions.
std::vector<int> gold_cluster_ids(const std::vector<Span>& spans, const Clusters& gold);

}  // namespace coref
