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

#include "coref/embedding.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "coref/buckets.hpp"
#include "coref/error.hpp"
#include "coref/rng.hpp"
#include "json.hpp"

namespace coref {
namespace {

void put_u32(std::ostream& out, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                        static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t get_u32(std::istream& in, const std::string& what) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4)) throw FormatError("truncated container reading " + what);
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

void put_f32(std::ostream& out, float f) { put_u32(out, std::bit_cast<std::uint32_t>(f)); }

float decode_f32(const unsigned char* b) {
  const std::uint32_t v = static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
                          (static_cast<std::uint32_t>(b[2]) << 16) |
                          (static_cast<std::uint32_t>(b[3]) << 24);
  return std::bit_cast<float>(v);
}

TokenEmbeddings embeddings_from_json(const nlohmann::json& j) {
  TokenEmbeddings e;
  e.doc_key = j.at("doc_key").get<std::string>();
  const auto& rows = j.at("vectors");
  e.dim = j.contains("dim") ? j["dim"].get<int>()
                            : (rows.empty() ? 0 : static_cast<int>(rows[0].size()));
  e.vectors.resize(static_cast<Eigen::Index>(rows.size()), e.dim);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (static_cast<int>(rows[i].size()) != e.dim) {
      throw DimensionError(e.doc_key + ": vector " + std::to_string(i) + " has length " +
                           std::to_string(rows[i].size()) + ", expected " + std::to_string(e.dim));
    }
    for (int k = 0; k < e.dim; ++k) e.vectors(static_cast<Eigen::Index>(i), k) = rows[i][k].get<double>();
  }
  return e;
}

}  // namespace

void write_embedding_container(const std::filesystem::path& path,
                               const std::vector<TokenEmbeddings>& docs) {
  const int dim = docs.empty() ? 0 : docs.front().dim;
  for (const auto& d : docs) {
    if (d.dim != dim || d.vectors.cols() != dim) {
      throw DimensionError("container documents disagree on dim: " + d.doc_key);
    }
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot write " + path.string());
  out.write(kContainerMagic, sizeof kContainerMagic);
  put_u32(out, kContainerVersion);
  put_u32(out, static_cast<std::uint32_t>(dim));
  put_u32(out, static_cast<std::uint32_t>(docs.size()));
  for (const auto& d : docs) {
    put_u32(out, static_cast<std::uint32_t>(d.doc_key.size()));
    out.write(d.doc_key.data(), static_cast<std::streamsize>(d.doc_key.size()));
    put_u32(out, static_cast<std::uint32_t>(d.vectors.rows()));
    for (Eigen::Index t = 0; t < d.vectors.rows(); ++t) {
      for (Eigen::Index k = 0; k < d.vectors.cols(); ++k) put_f32(out, static_cast<float>(d.vectors(t, k)));
    }
  }
  if (!out) throw FormatError("write failed for " + path.string());
}

EmbeddingStore EmbeddingStore::open(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LookupError("cannot open embeddings file " + path.string());
  EmbeddingStore store;
  store.path_ = path;
  char magic[8] = {};
  in.read(magic, sizeof magic);
  if (in.gcount() == 8 && std::memcmp(magic, kContainerMagic, 8) == 0) {
    const std::uint32_t version = get_u32(in, "version");
    if (version != kContainerVersion) {
      throw FormatError("unsupported container version " + std::to_string(version));
    }
    store.dim_ = static_cast<int>(get_u32(in, "dim"));
    const std::uint32_t n_docs = get_u32(in, "doc count");
    for (std::uint32_t i = 0; i < n_docs; ++i) {
      const std::uint32_t key_len = get_u32(in, "key length");
      std::string key(key_len, '\0');
      if (!in.read(key.data(), key_len)) throw FormatError("truncated container reading doc_key");
      Entry e;
      e.num_tokens = get_u32(in, "token count");
      e.offset = static_cast<std::uint64_t>(in.tellg());
      in.seekg(static_cast<std::streamoff>(std::uint64_t{e.num_tokens} * store.dim_ * 4), std::ios::cur);
      if (!in) throw FormatError("truncated container record for " + key);
      if (!store.index_.emplace(key, e).second) throw FormatError("duplicate doc_key in container: " + key);
    }
    return store;
  }

  store.binary_ = false;
  in.clear();
  in.seekg(0);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    TokenEmbeddings e;
    try {
      e = embeddings_from_json(nlohmann::json::parse(line));
    } catch (const nlohmann::json::exception& ex) {
      throw FormatError(path.string() + " line " + std::to_string(line_no) + ": " + ex.what());
    }
    if (store.parsed_.empty()) {
      store.dim_ = e.dim;
    } else if (e.dim != store.dim_) {
      throw DimensionError(e.doc_key + ": dim " + std::to_string(e.dim) + " differs from " +
                           std::to_string(store.dim_));
    }
    store.index_[e.doc_key] = Entry{0, static_cast<std::uint32_t>(e.num_tokens())};
    store.parsed_[e.doc_key] = std::move(e);
  }
  return store;
}

TokenEmbeddings EmbeddingStore::load(const std::string& doc_key) const {
  auto it = index_.find(doc_key);
  if (it == index_.end()) throw LookupError("doc_key not found in embeddings: " + doc_key);
  if (!binary_) return parsed_.at(doc_key);

  std::ifstream in(path_, std::ios::binary);
  in.seekg(static_cast<std::streamoff>(it->second.offset));
  const std::size_t count = std::size_t{it->second.num_tokens} * static_cast<std::size_t>(dim_);
  std::vector<unsigned char> buf(count * 4);
  if (!in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()))) {
    throw FormatError("truncated container record for " + doc_key);
  }
  TokenEmbeddings e;
  e.doc_key = doc_key;
  e.dim = dim_;
  e.vectors.resize(it->second.num_tokens, dim_);
  for (std::size_t i = 0; i < count; ++i) {
    const auto t = static_cast<Eigen::Index>(i / dim_);
    const auto k = static_cast<Eigen::Index>(i % dim_);
    e.vectors(t, k) = decode_f32(&buf[i * 4]);
  }
  if (!e.vectors.allFinite()) throw NumericError("non-finite embedding values for " + doc_key);
  return e;
}

std::vector<std::string> EmbeddingStore::doc_keys() const {
  std::vector<std::string> keys;
  for (const auto& [k, _] : index_) keys.push_back(k);
  return keys;
}

TokenEmbeddings load_embeddings(const std::filesystem::path& path, const std::string& doc_key) {
  return EmbeddingStore::open(path).load(doc_key);
}

TokenEmbeddings hash_embeddings(const Document& doc, int dim, std::uint64_t seed) {
  if (dim <= 0) throw ArgumentError("hash embedding dim must be positive");
  TokenEmbeddings e;
  e.doc_key = doc.doc_key;
  e.dim = dim;
  const auto tokens = doc.tokens();
  e.vectors.resize(static_cast<Eigen::Index>(tokens.size()), dim);
  const std::uint64_t base = mix64(seed);
  for (std::size_t pos = 0; pos < tokens.size(); ++pos) {
    const std::uint64_t lexical = mix64(base ^ fnv1a(tokens[pos]));
    const std::uint64_t positional = mix64(lexical ^ mix64(pos + 1));
    for (int k = 0; k < dim; ++k) {
      const double a = 2.0 * unit_double(mix64(lexical + static_cast<std::uint64_t>(k))) - 1.0;
      const double b = 2.0 * unit_double(mix64(positional + static_cast<std::uint64_t>(k))) - 1.0;
      e.vectors(static_cast<Eigen::Index>(pos), k) = 0.5 * (a + b);
    }
  }
  return e;
}

TokenEmbeddings HashEmbeddingProvider::embed(const Document& doc) const {
  return hash_embeddings(doc, dim_, seed_);
}

TokenEmbeddings FileEmbeddingProvider::embed(const Document& doc) const {
  TokenEmbeddings e = store_.load(doc.doc_key);
  if (e.num_tokens() != doc.num_tokens()) {
    throw DimensionError(doc.doc_key + ": embeddings have " + std::to_string(e.num_tokens()) +
                         " vectors for " + std::to_string(doc.num_tokens()) + " tokens");
  }
  return e;
}

nn::Vector head_attention_weights(const nn::Vector& token_scores, const Span& span) {
  if (span.start < 0 || span.end < span.start || span.end >= token_scores.size()) {
    throw ArgumentError("span out of range");
  }
  return nn::softmax(token_scores.segment(span.start, span.width()).transpose()).transpose();
}

nn::Var span_heads(nn::Var tokens, nn::Var scores, const std::vector<Span>& spans) {
  const nn::Matrix& e = tokens.value();
  const nn::Matrix& s = scores.value();
  if (s.rows() != e.rows() || s.cols() != 1) throw DimensionError("span_heads: scores must be n x 1");
  nn::Matrix out(static_cast<Eigen::Index>(spans.size()), e.cols());
  std::vector<nn::Vector> weights(spans.size());
  for (std::size_t i = 0; i < spans.size(); ++i) {
    const Span& sp = spans[i];
    if (sp.start < 0 || sp.end < sp.start || sp.end >= e.rows()) {
      throw ArgumentError("span [" + std::to_string(sp.start) + ", " + std::to_string(sp.end) +
                          "] out of range");
    }
    weights[i] = nn::softmax(s.col(0).segment(sp.start, sp.width()).transpose()).transpose();
    out.row(static_cast<Eigen::Index>(i)) =
        weights[i].transpose() * e.middleRows(sp.start, sp.width());
  }
  nn::Matrix heads = out;
  return tokens.graph().make(
      std::move(out), {tokens, scores},
      [tokens, scores, spans, weights = std::move(weights), heads = std::move(heads)](
          nn::Graph& g, const nn::Matrix& d) {
        const bool need_e = g.needs_grad(tokens);
        const bool need_s = g.needs_grad(scores);
        for (std::size_t i = 0; i < spans.size(); ++i) {
          const Span& sp = spans[i];
          const auto row = static_cast<Eigen::Index>(i);
          if (need_e) {
            g.grad_buffer(tokens).middleRows(sp.start, sp.width()) += weights[i] * d.row(row);
          }
          if (need_s) {
            // d/ds_t = w_t (d . e_t - d . head)
            const nn::Vector proj = tokens.value().middleRows(sp.start, sp.width()) * d.row(row).transpose();
            const nn::Real base = d.row(row).dot(heads.row(row));
            g.grad_buffer(scores).col(0).segment(sp.start, sp.width()) +=
                weights[i].cwiseProduct((proj.array() - base).matrix());
          }
        }
      });
}

SpanEncoder::SpanEncoder(nn::ParameterStore& store, int token_dim, int width_dim)
    : token_dim_(token_dim), width_dim_(width_dim) {
  head_w_ = &store.add("span.head.w", token_dim, 1);
  head_b_ = &store.add("span.head.b", 1, 1, nn::Parameter::Init::kZero);
  width_ = nn::EmbeddingTable(store, "span.width_emb", kNumDistanceBuckets, width_dim);
}

nn::Var SpanEncoder::head_scores(nn::Graph& g, nn::Var tokens) const {
  return nn::linear(tokens, g.param(*head_w_), g.param(*head_b_));
}

nn::Var SpanEncoder::encode(nn::Graph& g, nn::Var tokens, const std::vector<Span>& spans) const {
  if (tokens.cols() != token_dim_) {
    throw DimensionError("span encoder expects token dim " + std::to_string(token_dim_) + ", got " +
                         std::to_string(tokens.cols()));
  }
  nn::IndexVector starts, ends, widths;
  for (const Span& s : spans) {
    if (s.start < 0 || s.end < s.start || s.end >= tokens.rows()) {
      throw ArgumentError("span [" + std::to_string(s.start) + ", " + std::to_string(s.end) +
                          "] out of range");
    }
    starts.push_back(s.start);
    ends.push_back(s.end);
    widths.push_back(distance_bucket(s.width()));
  }
  nn::Var head = span_heads(tokens, head_scores(g, tokens), spans);
  return nn::concat_cols({nn::gather_rows(tokens, starts), nn::gather_rows(tokens, ends), head,
                          width_.lookup(g, widths)});
}

SpanRepr build_span_repr(const SpanEncoder& encoder, const TokenEmbeddings& emb, const Span& span) {
  nn::Graph g(false);
  nn::Var tokens = g.constant(emb.vectors);
  nn::Var out = encoder.encode(g, tokens, {span});
  return {span, out.value().row(0).transpose(), distance_bucket(span.width())};
}

}  // namespace coref
