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

#include "coref/ranker.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "coref/buckets.hpp"
#include "coref/error.hpp"
#include "coref/union_find.hpp"

namespace coref {

SpanCandidateSet enumerate_spans(const Document& doc, int max_width) {
  if (max_width < 1) throw ArgumentError("max_width must be >= 1");
  SpanCandidateSet set;
  int offset = 0;
  for (const auto& sentence : doc.sentences) {
    const int len = static_cast<int>(sentence.size());
    for (int s = 0; s < len; ++s) {
      for (int e = s; e < len && e - s + 1 <= max_width; ++e) {
        set.spans.push_back({offset + s, offset + e});
      }
    }
    offset += len;
  }
  return set;
}

std::vector<int> prune_spans(const SpanCandidateSet& set, double ratio, int num_tokens, int cap) {
  if (set.mention_scores.size() != set.spans.size()) {
    throw DimensionError("prune_spans: mention scores not computed");
  }
  const auto by_ratio = static_cast<long>(std::ceil(ratio * num_tokens));
  const long target = std::min<long>({by_ratio, static_cast<long>(cap),
                                      static_cast<long>(set.spans.size())});
  std::vector<int> order(set.spans.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return set.mention_scores[a] > set.mention_scores[b];
  });
  std::vector<int> kept;
  for (int i : order) {
    if (static_cast<long>(kept.size()) >= target) break;
    const Span& s = set.spans[i];
    const bool crosses = std::any_of(kept.begin(), kept.end(),
                                     [&](int k) { return set.spans[k].crosses(s); });
    if (!crosses) kept.push_back(i);
  }
  std::sort(kept.begin(), kept.end(), [&](int a, int b) { return set.spans[a] < set.spans[b]; });
  return kept;
}

void AntecedentFrame::finalize(int max_candidates_cap) {
  max_candidates = 0;
  for (const auto& c : candidates) {
    if (static_cast<int>(c.size()) > max_candidates_cap) {
      throw DimensionError("candidate list exceeds the antecedent cap");
    }
    max_candidates = std::max(max_candidates, static_cast<int>(c.size()));
  }
  const int n = size();
  mask = nn::Mask::Constant(n, max_candidates + 1, false);
  pair_anaphor.clear();
  pair_antecedent.clear();
  pair_column.clear();
  for (int x = 0; x < n; ++x) {
    mask(x, 0) = true;
    for (int k = 0; k < static_cast<int>(candidates[x].size()); ++k) {
      const int y = candidates[x][k];
      if (y < 0 || y >= x) throw ArgumentError("antecedent candidates must precede the anaphor");
      mask(x, k + 1) = true;
      pair_anaphor.push_back(x);
      pair_antecedent.push_back(y);
      pair_column.push_back(k + 1);
    }
  }
}

AntecedentFrame select_antecedents(const std::vector<Span>& spans, const nn::Matrix& reprs,
                                   const nn::Vector& mention_scores,
                                   const nn::Matrix& coarse_weight, int max_antecedents) {
  const int n = static_cast<int>(spans.size());
  if (reprs.rows() != n || mention_scores.size() != n) {
    throw DimensionError("select_antecedents: reprs and scores must have one row per span");
  }
  AntecedentFrame frame;
  frame.spans = spans;
  frame.candidates.resize(n);
  if (n > 0) {
    const nn::Matrix projected = reprs * coarse_weight;  // N x d
    for (int x = 1; x < n; ++x) {
      std::vector<std::pair<double, int>> scored;
      scored.reserve(x);
      for (int y = 0; y < x; ++y) {
        const double c = mention_scores(x) + mention_scores(y) + projected.row(x).dot(reprs.row(y));
        scored.push_back({c, y});
      }
      const int keep = std::min(max_antecedents, x);
      std::partial_sort(scored.begin(), scored.begin() + keep, scored.end(),
                        [](const auto& a, const auto& b) {
                          return a.first != b.first ? a.first > b.first : a.second > b.second;
                        });
      auto& cands = frame.candidates[x];
      for (int k = 0; k < keep; ++k) cands.push_back(scored[k].second);
      std::sort(cands.begin(), cands.end(), std::greater<>());
    }
  }
  frame.finalize(std::max(max_antecedents, 0));
  return frame;
}

int genre_id(const std::string& genre) {
  static const std::map<std::string, int> ids = {{"bc", 0}, {"bn", 1}, {"mz", 2}, {"nw", 3},
                                                 {"pt", 4}, {"tc", 5}, {"wb", 6}};
  auto it = ids.find(genre);
  return it == ids.end() ? kNumGenres - 1 : it->second;
}

MetaFeatures meta_features(const AntecedentFrame& frame, const std::vector<std::string>& speakers,
                           const std::string& genre, const std::vector<int>& segment_of_token) {
  MetaFeatures f;
  const int gid = genre_id(genre);
  for (std::size_t p = 0; p < frame.pair_anaphor.size(); ++p) {
    const Span& x = frame.spans[frame.pair_anaphor[p]];
    const Span& y = frame.spans[frame.pair_antecedent[p]];
    f.same_speaker.push_back(speakers.at(x.start) == speakers.at(y.start) ? 1 : 0);
    f.distance.push_back(distance_bucket(frame.pair_anaphor[p] - frame.pair_antecedent[p]));
    f.genre.push_back(gid);
    // Segment distance starts at 0; shift by one into the shared buckets.
    const int seg = segment_of_token.at(x.start) - segment_of_token.at(y.start);
    f.segment_distance.push_back(distance_bucket(seg + 1));
  }
  return f;
}

MentionScorer::MentionScorer(nn::ParameterStore& store, int span_dim,
                             const std::vector<int>& hidden)
    : ffnn_(store, "mention", span_dim, hidden, 1) {}

nn::Var MentionScorer::score(nn::Graph& g, nn::Var reprs, const nn::DropoutContext& dropout) const {
  return ffnn_.forward(g, reprs, dropout);
}

PairScorer::PairScorer(nn::ParameterStore& store, int span_dim, int feature_dim,
                       const std::vector<int>& hidden)
    : feature_dim_(feature_dim),
      ffnn_(store, "pair", 3 * span_dim + 4 * feature_dim, hidden, 1),
      speaker_(store, "pair.speaker_emb", 2, feature_dim),
      distance_(store, "pair.distance_emb", kNumDistanceBuckets, feature_dim),
      genre_(store, "pair.genre_emb", kNumGenres, feature_dim),
      segment_distance_(store, "pair.segment_distance_emb", kNumDistanceBuckets, feature_dim) {}

nn::Var PairScorer::coref_scores(nn::Graph& g, nn::Var reprs, const AntecedentFrame& frame,
                                 const MetaFeatures& features,
                                 const nn::DropoutContext& dropout) const {
  if (frame.pair_anaphor.empty()) return g.constant(nn::Matrix::Zero(0, 1));
  nn::Var gx = nn::gather_rows(reprs, frame.pair_anaphor);
  nn::Var gy = nn::gather_rows(reprs, frame.pair_antecedent);
  nn::Var phi = nn::concat_cols({speaker_.lookup(g, features.same_speaker),
                                 distance_.lookup(g, features.distance),
                                 genre_.lookup(g, features.genre),
                                 segment_distance_.lookup(g, features.segment_distance)});
  nn::Var input = nn::concat_cols({gx, gy, nn::mul(gx, gy), dropout.apply(phi)});
  return ffnn_.forward(g, input, dropout);
}

nn::Var antecedent_scores(nn::Var mention_scores, nn::Var coref_scores,
                          const AntecedentFrame& frame) {
  nn::Graph& g = mention_scores.graph();
  if (frame.pair_anaphor.empty()) {
    return g.constant(nn::Matrix::Zero(frame.size(), frame.columns()));
  }
  nn::Var pair = nn::gather_rows(mention_scores, frame.pair_anaphor) +
                 nn::gather_rows(mention_scores, frame.pair_antecedent) + coref_scores;
  return nn::scatter(pair, frame.pair_anaphor, frame.pair_column, frame.size(), frame.columns());
}

nn::Matrix antecedent_distribution(const nn::Matrix& scores, const AntecedentFrame& frame) {
  nn::Matrix p(scores.rows(), scores.cols());
  for (Eigen::Index x = 0; x < scores.rows(); ++x) {
    p.row(x) = nn::masked_softmax(scores.row(x), frame.mask.row(x));
  }
  return p;
}

std::vector<int> best_antecedents(const nn::Matrix& scores, const AntecedentFrame& frame) {
  std::vector<int> out(frame.size(), -1);
  for (int x = 0; x < frame.size(); ++x) {
    double best = scores(x, 0);
    for (int k = 0; k < static_cast<int>(frame.candidates[x].size()); ++k) {
      if (scores(x, k + 1) > best) {
        best = scores(x, k + 1);
        out[x] = frame.candidates[x][k];
      }
    }
  }
  return out;
}

std::vector<int> link_clusters(const std::vector<int>& antecedents) {
  UnionFind uf(antecedents.size());
  for (std::size_t x = 0; x < antecedents.size(); ++x) {
    if (antecedents[x] >= 0) uf.unite(x, static_cast<std::size_t>(antecedents[x]));
  }
  std::vector<int> ids(antecedents.size(), -1);
  std::map<std::size_t, int> root_id;
  for (std::size_t x = 0; x < antecedents.size(); ++x) {
    auto [it, inserted] = root_id.emplace(uf.find(x), static_cast<int>(root_id.size()));
    ids[x] = it->second;
  }
  return ids;
}

Clusters decode_clusters(const std::vector<int>& antecedents, const std::vector<Span>& spans) {
  if (antecedents.size() != spans.size()) throw DimensionError("decode_clusters: size mismatch");
  const auto ids = link_clusters(antecedents);
  Clusters clusters;
  for (std::size_t x = 0; x < ids.size(); ++x) {
    if (ids[x] >= static_cast<int>(clusters.size())) clusters.resize(ids[x] + 1);
    clusters[ids[x]].push_back(spans[x]);
  }
  std::erase_if(clusters, [](const Cluster& c) { return c.size() < 2; });
  return canonical_clusters(std::move(clusters));
}

std::vector<int> gold_cluster_ids(const std::vector<Span>& spans, const Clusters& gold) {
  std::map<Span, int> id_of;
  for (int c = 0; c < static_cast<int>(gold.size()); ++c) {
    for (const Span& m : gold[c]) id_of[m] = c;
  }
  std::vector<int> ids;
  ids.reserve(spans.size());
  for (const Span& s : spans) {
    auto it = id_of.find(s);
    ids.push_back(it == id_of.end() ? -1 : it->second);
  }
  return ids;
}

}  // namespace coref
