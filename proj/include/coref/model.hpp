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

#include <optional>
#include <vector>

#include "coref/config.hpp"
#include "coref/embedding.hpp"
#include "coref/hoi.hpp"
#include "coref/ranker.hpp"

namespace coref {

struct ForwardOptions {
  bool training = false;
  Rng* rng = nullptr;  // dropout stream; required when training
  // Overrides the configured method; kNone turns higher-order inference off.
  std::optional<HoiMethod> method;
};

// Scores of one antecedent-ranking round.
struct ScoringRound {
  nn::Var mention_scores;  // N x 1
  nn::Var coref_scores;    // P x 1
  nn::Var scores;          // N x (K + 1)
};

struct DocumentPrediction {
  std::string doc_key;
  std::vector<Span> spans;
  std::vector<int> antecedents_pre_hoi;  // -1 for the dummy
  std::vector<int> antecedents;
  Clusters clusters;

  bool operator==(const DocumentPrediction&) const = default;
};

struct ForwardResult {
  AntecedentFrame frame;
  MetaFeatures features;
  nn::Var reprs;        // kept span representations before refinement
  nn::Var base_scores;  // first round
  nn::Var final_scores;
  std::vector<int> antecedents_pre_hoi;
  std::vector<int> antecedents;
  Clusters clusters;
  HoiMethod method = HoiMethod::kNone;
  // Scalar entries allocated on the graph by the higher-order stage.
  std::size_t hoi_allocated = 0;

  DocumentPrediction prediction(const std::string& doc_key) const;
};

class CorefModel {
 public:
  CorefModel(ModelConfig config, int token_dim);
  CorefModel(const CorefModel&) = delete;
  CorefModel& operator=(const CorefModel&) = delete;

  // Glorot initialization from seed; honors gate.init.
  void initialize(std::uint64_t seed);

  ForwardResult forward(nn::Graph& g, const Document& doc, const TokenEmbeddings& emb,
                        const ForwardOptions& options = {}) const;

  DocumentPrediction predict(const Document& doc, const TokenEmbeddings& emb,
                             std::optional<HoiMethod> method = std::nullopt) const;

  // One ranking round over the given span representations.
  ScoringRound score_round(nn::Graph& g, nn::Var reprs, const AntecedentFrame& frame,
                           const MetaFeatures& features,
                           const nn::DropoutContext& dropout = {}) const;

  const ModelConfig& config() const { return config_; }
  int token_dim() const { return token_dim_; }
  int span_dim() const { return encoder_.output_dim(); }

  nn::ParameterStore& params() { return params_; }
  const nn::ParameterStore& params() const { return params_; }

  const SpanEncoder& encoder() const { return encoder_; }
  const MentionScorer& mention_scorer() const { return mention_; }
  const PairScorer& pair_scorer() const { return pair_; }
  const nn::Gate& gate() const { return gate_; }
  const nn::Ffnn& cluster_attention_ffnn() const { return sc_attention_; }
  const ClusterScorer& cluster_scorer() const { return cluster_; }
  nn::Parameter& coarse_weight() const { return *coarse_; }

 private:
  ModelConfig config_;
  int token_dim_;
  nn::ParameterStore params_;
  SpanEncoder encoder_;
  MentionScorer mention_;
  PairScorer pair_;
  nn::Parameter* coarse_ = nullptr;
  nn::Gate gate_;
  nn::Ffnn sc_attention_;
  ClusterScorer cluster_;
};

}  // namespace coref
