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

#include "coref/model.hpp"

#include <algorithm>

#include "coref/error.hpp"

namespace coref {
namespace {

std::vector<int> hidden_layers(const ModelConfig& c) {
  return std::vector<int>(static_cast<std::size_t>(c.ffnn_depth), c.ffnn_size);
}

}  // namespace

DocumentPrediction ForwardResult::prediction(const std::string& doc_key) const {
  return {doc_key, frame.spans, antecedents_pre_hoi, antecedents, clusters};
}

CorefModel::CorefModel(ModelConfig config, int token_dim)
    : config_(std::move(config)), token_dim_(token_dim) {
  if (token_dim <= 0) throw ArgumentError("token dim must be positive");
  const auto hidden = hidden_layers(config_);
  encoder_ = SpanEncoder(params_, token_dim);
  const int span_dim = encoder_.output_dim();
  mention_ = MentionScorer(params_, span_dim, hidden);
  pair_ = PairScorer(params_, span_dim, config_.feature_dim, hidden);
  coarse_ = &params_.add("coarse.w", span_dim, span_dim);
  gate_ = nn::Gate(params_, "gate", span_dim);
  sc_attention_ = nn::Ffnn(params_, "sc.attention", span_dim, hidden, 1);
  cluster_ = ClusterScorer(params_, span_dim, config_.feature_dim, hidden);
}

void CorefModel::initialize(std::uint64_t seed) {
  params_.initialize(seed);
  if (config_.gate_init == "keep") gate_.force(true);
}

ScoringRound CorefModel::score_round(nn::Graph& g, nn::Var reprs, const AntecedentFrame& frame,
                                     const MetaFeatures& features,
                                     const nn::DropoutContext& dropout) const {
  ScoringRound r;
  r.mention_scores = mention_.score(g, reprs, dropout);
  r.coref_scores = pair_.coref_scores(g, reprs, frame, features, dropout);
  r.scores = antecedent_scores(r.mention_scores, r.coref_scores, frame);
  return r;
}

ForwardResult CorefModel::forward(nn::Graph& g, const Document& doc, const TokenEmbeddings& emb,
                                  const ForwardOptions& options) const {
  if (emb.num_tokens() != doc.num_tokens()) {
    throw DimensionError(doc.doc_key + ": " + std::to_string(emb.num_tokens()) +
                         " embedding rows for " + std::to_string(doc.num_tokens()) + " tokens");
  }
  if (emb.vectors.cols() != token_dim_) {
    throw DimensionError(doc.doc_key + ": embedding dim " + std::to_string(emb.vectors.cols()) +
                         " != model token dim " + std::to_string(token_dim_));
  }
  if (options.training && options.rng == nullptr) {
    throw ArgumentError("training forward pass needs a dropout generator");
  }
  nn::DropoutContext dropout;
  if (options.training) dropout = {config_.dropout, options.rng};

  ForwardResult out;
  out.method = options.method.value_or(config_.hoi.method);

  nn::Var tokens = dropout.apply(g.constant(emb.vectors));
  SpanCandidateSet candidates = enumerate_spans(doc, config_.max_span_width);
  if (candidates.spans.empty()) {
    out.frame.finalize(0);
    out.base_scores = out.final_scores = g.constant(nn::Matrix::Zero(0, 1));
    out.reprs = g.constant(nn::Matrix::Zero(0, span_dim()));
    return out;
  }
  nn::Var all_reprs = encoder_.encode(g, tokens, candidates.spans);
  nn::Var all_mention = mention_.score(g, all_reprs, dropout);
  const nn::Matrix& ms = all_mention.value();
  candidates.mention_scores.assign(ms.data(), ms.data() + ms.rows());

  int cap = config_.max_top_spans;
  if (out.method == HoiMethod::kEntityEqualization) cap = std::min(cap, config_.hoi.ee_max_spans);
  const std::vector<int> kept = prune_spans(candidates, config_.top_span_ratio, doc.num_tokens(), cap);

  std::vector<Span> spans;
  nn::IndexVector kept_rows;
  nn::Vector kept_scores(static_cast<Eigen::Index>(kept.size()));
  for (std::size_t i = 0; i < kept.size(); ++i) {
    spans.push_back(candidates.spans[kept[i]]);
    kept_rows.push_back(kept[i]);
    kept_scores(static_cast<Eigen::Index>(i)) = candidates.mention_scores[kept[i]];
  }
  nn::Var reprs = nn::gather_rows(all_reprs, kept_rows);
  out.reprs = reprs;
  out.frame = select_antecedents(spans, reprs.value(), kept_scores, coarse_->value,
                                 config_.max_antecedents);
  const auto segments = segment_document(doc, config_.max_segment_len, /*warn=*/false);
  out.features = meta_features(out.frame, doc.speakers, doc.genre,
                               segment_map(segments, doc.num_tokens()));

  ScoringRound base = score_round(g, reprs, out.frame, out.features, dropout);
  out.base_scores = base.scores;
  out.antecedents_pre_hoi = best_antecedents(base.scores.value(), out.frame);

  const std::size_t before = g.allocated();
  switch (out.method) {
    case HoiMethod::kNone:
      out.final_scores = base.scores;
      break;
    case HoiMethod::kAttendedAntecedent:
    case HoiMethod::kEntityEqualization:
    case HoiMethod::kSpanClustering: {
      nn::Var current = reprs;
      nn::Var scores = base.scores;
      for (int round = 0; round < config_.hoi.rounds; ++round) {
        nn::Var refined;
        if (out.method == HoiMethod::kSpanClustering) {
          // Hard clusters from the current decisions, singletons included.
          const auto ids = link_clusters(best_antecedents(scores.value(), out.frame));
          nn::Var logits = sc_attention_.forward(g, current, dropout);
          refined = cluster_attention(current, logits, ids);
        } else {
          nn::Var p = nn::row_softmax(scores, out.frame.mask);
          refined = out.method == HoiMethod::kAttendedAntecedent
                        ? attend_antecedents(current, p, out.frame)
                        : attend_entities(current, entity_membership(p, out.frame));
        }
        current = gate_.forward(g, current, refined);
        scores = score_round(g, current, out.frame, out.features, dropout).scores;
      }
      out.final_scores = scores;
      break;
    }
    case HoiMethod::kClusterMerging: {
      CmResult cm = rank_cm(reprs, base.scores, out.frame, cluster_, config_.hoi.cm_order,
                            config_.hoi.cm_reduce, dropout);
      out.final_scores = cm.scores;
      break;
    }
  }
  out.hoi_allocated = g.allocated() - before;
  out.antecedents = best_antecedents(out.final_scores.value(), out.frame);
  out.clusters = decode_clusters(out.antecedents, out.frame.spans);
  return out;
}

DocumentPrediction CorefModel::predict(const Document& doc, const TokenEmbeddings& emb,
                                       std::optional<HoiMethod> method) const {
  nn::Graph g(false);
  ForwardOptions options;
  options.method = method;
  return forward(g, doc, emb, options).prediction(doc.doc_key);
}

}  // namespace coref
