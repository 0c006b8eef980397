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

#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "coref/config.hpp"
#include "coref/corpus.hpp"
#include "coref/ranker.hpp"
#include "coref/rng.hpp"

#ifndef COREF_TEST_DATA_DIR
#define COREF_TEST_DATA_DIR "tests/data"
#endif

namespace coref::testing {

inline std::string data_path(const std::string& name) {
  return std::string(COREF_TEST_DATA_DIR) + "/" + name;
}

inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::vector<Document> toy_corpus() { return from_jsonlines(slurp(data_path("toy.jsonlines"))); }

// Random document with nested and cross-sentence mentions. Mentions of one
// cluster never cross each other, which CoNLL brackets cannot express.
inline Document random_document(Rng& rng, int index, int max_sentences = 4, int max_len = 8,
                                int max_clusters = 4) {
  static const char* kGenres[] = {"bc", "bn", "mz", "nw", "pt", "tc", "wb"};
  static const char* kWords[] = {"the", "a", "dog", "ran", "it", "Alice", "said", ",", ".", "they",
                                 "house", "of", "to", "and", "Bob", "was"};
  static const char* kSpeakers[] = {"-", "spk_a", "spk_b"};
  Document doc;
  doc.doc_key = std::string(kGenres[rng.below(7)]) + "/rand/" + std::to_string(index) + "_" +
                std::to_string(rng.below(3));
  doc.genre = doc.doc_key.substr(0, 2);
  const int n_sent = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_sentences)));
  for (int s = 0; s < n_sent; ++s) {
    const int len = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_len)));
    std::vector<std::string> sent;
    const std::string speaker = kSpeakers[rng.below(3)];
    for (int w = 0; w < len; ++w) {
      sent.push_back(kWords[rng.below(16)]);
      doc.speakers.push_back(speaker);
    }
    doc.sentences.push_back(std::move(sent));
  }
  const int n = doc.num_tokens();
  std::set<Span> used;
  const int n_clusters = static_cast<int>(rng.below(static_cast<std::uint64_t>(max_clusters + 1)));
  for (int c = 0; c < n_clusters; ++c) {
    Cluster cluster;
    const int size = 1 + static_cast<int>(rng.below(4));
    for (int tries = 0; tries < 20 && static_cast<int>(cluster.size()) < size; ++tries) {
      const int start = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
      const int end = std::min(n - 1, start + static_cast<int>(rng.below(4)));
      const Span s{start, end};
      if (used.count(s)) continue;
      bool crosses = false;
      for (const Span& o : cluster) crosses = crosses || s.crosses(o);
      if (crosses) continue;
      used.insert(s);
      cluster.push_back(s);
    }
    if (!cluster.empty()) doc.clusters.push_back(std::move(cluster));
  }
  doc.clusters = canonical_clusters(std::move(doc.clusters));
  return doc;
}

// Random partition of a random subset of mentions {0..n-1} (unit spans).
inline Clusters random_clusters(Rng& rng, int n_mentions, int max_clusters) {
  std::vector<Cluster> clusters(static_cast<std::size_t>(max_clusters));
  for (int m = 0; m < n_mentions; ++m) {
    if (rng.bernoulli(0.2)) continue;
    clusters[rng.below(static_cast<std::uint64_t>(max_clusters))].push_back(Span{m, m});
  }
  Clusters out;
  for (auto& c : clusters) {
    if (!c.empty()) out.push_back(std::move(c));
  }
  return out;
}

// Document of filler tokens with the given sentence lengths.
inline Document plain_document(const std::vector<int>& sentence_lengths, std::string doc_key = "nw/plain_0") {
  Document doc;
  doc.doc_key = std::move(doc_key);
  doc.genre = doc.doc_key.substr(0, 2);
  for (int len : sentence_lengths) {
    std::vector<std::string> sent;
    for (int i = 0; i < len; ++i) {
      sent.push_back("w" + std::to_string(doc.speakers.size()));
      doc.speakers.push_back("-");
    }
    doc.sentences.push_back(std::move(sent));
  }
  return doc;
}

// Frame over n unit spans where each span draws a random subset of its
// predecessors (at most max_candidates), nearest first.
inline AntecedentFrame random_frame(Rng& rng, int n, int max_candidates) {
  AntecedentFrame frame;
  for (int i = 0; i < n; ++i) frame.spans.push_back(Span{i, i});
  frame.candidates.resize(static_cast<std::size_t>(n));
  for (int x = 0; x < n; ++x) {
    for (int y = x - 1; y >= 0; --y) {
      if (static_cast<int>(frame.candidates[x].size()) < max_candidates && rng.bernoulli(0.7)) {
        frame.candidates[x].push_back(y);
      }
    }
  }
  frame.finalize(max_candidates);
  return frame;
}

// Small network sizes keep unit tests fast.
inline ModelConfig small_model_config(HoiMethod method = HoiMethod::kNone) {
  ModelConfig c;
  c.ffnn_size = 12;
  c.ffnn_depth = 1;
  c.feature_dim = 4;
  c.dropout = 0.0;
  c.max_span_width = 4;
  c.hoi.method = method;
  return c;
}

}  // namespace coref::testing
