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

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "coref/corpus.hpp"
#include "coref/nn/layers.hpp"

namespace coref {

struct TokenEmbeddings {
  std::string doc_key;
  int dim = 0;
  nn::Matrix vectors;  // num_tokens x dim

  int num_tokens() const { return static_cast<int>(vectors.rows()); }
};

// Binary container: "CREMBED1", u32 version, u32 dim, u32 doc count, then
// per document u32 key length, key bytes, u32 token count and
// token_count * dim little-endian float32 values (row-major).
inline constexpr char kContainerMagic[8] = {'C', 'R', 'E', 'M', 'B', 'E', 'D', '1'};
inline constexpr std::uint32_t kContainerVersion = 1;

void write_embedding_container(const std::filesystem::path& path,
                               const std::vector<TokenEmbeddings>& docs);

// Random access over a container file, or over the jsonlines debug format
// ({"doc_key": ..., "dim": ..., "vectors": [[...], ...]} per line).
class EmbeddingStore {
 public:
  static EmbeddingStore open(const std::filesystem::path& path);

  // Throws LookupError for an unknown doc_key.
  TokenEmbeddings load(const std::string& doc_key) const;
  bool contains(const std::string& doc_key) const { return index_.count(doc_key) > 0; }
  int dim() const { return dim_; }
  std::vector<std::string> doc_keys() const;

 private:
  struct Entry {
    std::uint64_t offset = 0;  // binary: start of float data
    std::uint32_t num_tokens = 0;
  };

  std::filesystem::path path_;
  bool binary_ = true;
  int dim_ = 0;
  std::map<std::string, Entry> index_;
  std::map<std::string, TokenEmbeddings> parsed_;  // jsonlines only
};

TokenEmbeddings load_embeddings(const std::filesystem::path& path, const std::string& doc_key);

// Deterministic test provider. Each entry is the mean of a token-keyed and
// a (token, position)-keyed draw, both in [-1, 1], from a counter-based
// generator keyed by seed.
TokenEmbeddings hash_embeddings(const Document& doc, int dim, std::uint64_t seed);

class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  // Vectors for every token of doc. Throws on count or lookup mismatch.
  virtual TokenEmbeddings embed(const Document& doc) const = 0;
  virtual int dim() const = 0;
};

class HashEmbeddingProvider final : public EmbeddingProvider {
 public:
  HashEmbeddingProvider(int dim, std::uint64_t seed) : dim_(dim), seed_(seed) {}
  TokenEmbeddings embed(const Document& doc) const override;
  int dim() const override { return dim_; }

 private:
  int dim_;
  std::uint64_t seed_;
};

class FileEmbeddingProvider final : public EmbeddingProvider {
 public:
  explicit FileEmbeddingProvider(const std::filesystem::path& path)
      : store_(EmbeddingStore::open(path)) {}
  TokenEmbeddings embed(const Document& doc) const override;
  int dim() const override { return store_.dim(); }

 private:
  EmbeddingStore store_;
};

inline constexpr int kWidthFeatureDim = 20;

struct SpanRepr {
  Span span;
  nn::Vector g;
  int width_bucket = 0;
};

// Softmax of the token head scores restricted to the span.
nn::Vector head_attention_weights(const nn::Vector& token_scores, const Span& span);

// Composes span vectors [start token; end token; attended head; width
// embedding] from token embeddings.
class SpanEncoder {
 public:
  SpanEncoder() = default;
  SpanEncoder(nn::ParameterStore& store, int token_dim, int width_dim = kWidthFeatureDim);

  int token_dim() const { return token_dim_; }
  int output_dim() const { return 3 * token_dim_ + width_dim_; }

  // Per-token scalar head scores, num_tokens x 1.
  nn::Var head_scores(nn::Graph& g, nn::Var tokens) const;
  // spans.size() x output_dim().
  nn::Var encode(nn::Graph& g, nn::Var tokens, const std::vector<Span>& spans) const;

  nn::Parameter& head_weight() const { return *head_w_; }
  nn::Parameter& head_bias() const { return *head_b_; }

 private:
  int token_dim_ = 0;
  int width_dim_ = 0;
  nn::Parameter* head_w_ = nullptr;
  nn::Parameter* head_b_ = nullptr;
  nn::EmbeddingTable width_;
};

SpanRepr build_span_repr(const SpanEncoder& encoder, const TokenEmbeddings& emb, const Span& span);

// Attention-weighted sum of token rows within each span; the attention is
// a softmax of scores restricted to the span.
nn::Var span_heads(nn::Var tokens, nn::Var scores, const std::vector<Span>& spans);

}  // namespace coref
