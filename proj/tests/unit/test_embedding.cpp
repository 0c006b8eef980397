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

#include <filesystem>
#include <fstream>

#include "doctest.h"

#include "coref/embedding.hpp"
#include "coref/error.hpp"
#include "coref/nn/gradcheck.hpp"
#include "coref/nn/ops.hpp"
#include "support.hpp"

using namespace coref;
using namespace coref::testing;

namespace {

Document two_sentence_doc() {
  Document d;
  d.doc_key = "nw/emb_0";
  d.genre = "nw";
  d.sentences = {{"the", "cat", "sat"}, {"on", "the", "mat"}};
  d.speakers.assign(6, "-");
  return d;
}

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("coref_test_" + name);
}

}  // namespace

TEST_SUITE("embedding") {
  TEST_CASE("hash embeddings are deterministic and bounded") {
    const Document d = two_sentence_doc();
    const auto a = hash_embeddings(d, 16, 7);
    const auto b = hash_embeddings(d, 16, 7);
    CHECK(a.vectors == b.vectors);
    CHECK(a.vectors.rows() == 6);
    CHECK(a.vectors.cols() == 16);
    CHECK(a.vectors.maxCoeff() <= 1.0);
    CHECK(a.vectors.minCoeff() >= -1.0);
  }

  TEST_CASE("hash embeddings are salted by position") {
    const Document d = two_sentence_doc();
    const auto e = hash_embeddings(d, 16, 0);
    CHECK(d.tokens()[0] == d.tokens()[4]);
    CHECK(e.vectors.row(0) != e.vectors.row(4));
  }

  TEST_CASE("different seeds give different vectors over 100 trials") {
    const Document d = two_sentence_doc();
    int differing = 0;
    for (std::uint64_t s = 0; s < 100; ++s) {
      if (hash_embeddings(d, 8, s).vectors != hash_embeddings(d, 8, s + 1000).vectors) ++differing;
    }
    CHECK(differing == 100);
  }

  TEST_CASE("binary container round-trips and reports lookups") {
    const Document d = two_sentence_doc();
    auto e = hash_embeddings(d, 8, 3);
    e.vectors = e.vectors.cast<float>().cast<double>();
    const auto path = temp_path("container.bin");
    write_embedding_container(path, {e});
    const auto store = EmbeddingStore::open(path);
    CHECK(store.dim() == 8);
    CHECK(store.contains("nw/emb_0"));
    const auto back = store.load("nw/emb_0");
    CHECK(back.vectors == e.vectors);
    CHECK_THROWS_AS(store.load("missing"), LookupError);
    CHECK(load_embeddings(path, "nw/emb_0").num_tokens() == d.num_tokens());
    std::filesystem::remove(path);
  }

  TEST_CASE("one-document container with three tokens of dim 8") {
    TokenEmbeddings e;
    e.doc_key = "bc/one_0";
    e.dim = 8;
    e.vectors = nn::Matrix::Constant(3, 8, 0.25);
    const auto path = temp_path("one.bin");
    write_embedding_container(path, {e});
    const auto back = load_embeddings(path, "bc/one_0");
    CHECK(back.vectors.rows() == 3);
    CHECK(back.vectors.cols() == 8);
    std::filesystem::remove(path);
  }

  TEST_CASE("jsonlines dump is accepted as a fallback") {
    const auto path = temp_path("emb.jsonlines");
    {
      std::ofstream out(path);
      out << R"({"doc_key":"a_0","dim":2,"vectors":[[1,2],[3,4]]})" << "\n";
    }
    const auto e = load_embeddings(path, "a_0");
    CHECK(e.vectors(1, 0) == 3.0);
    std::filesystem::remove(path);
  }

  TEST_CASE("file provider checks token counts against the document") {
    const Document d = two_sentence_doc();
    TokenEmbeddings e;
    e.doc_key = d.doc_key;
    e.dim = 4;
    e.vectors = nn::Matrix::Zero(5, 4);
    const auto path = temp_path("short.bin");
    write_embedding_container(path, {e});
    FileEmbeddingProvider provider(path);
    CHECK_THROWS_AS(provider.embed(d), DimensionError);
    std::filesystem::remove(path);
  }

  TEST_CASE("head attention weights sum to one over random spans") {
    Rng rng(9);
    for (int t = 0; t < 200; ++t) {
      nn::Vector scores(20);
      for (int i = 0; i < 20; ++i) scores(i) = rng.uniform(-5, 5);
      const int start = static_cast<int>(rng.below(20));
      const int end = start + static_cast<int>(rng.below(static_cast<std::uint64_t>(20 - start)));
      const nn::Vector w = head_attention_weights(scores, Span{start, end});
      CHECK(std::abs(w.sum() - 1.0) <= 1e-6);
      CHECK(w.minCoeff() >= 0.0);
    }
    CHECK_THROWS_AS(head_attention_weights(nn::Vector::Zero(3), Span{1, 3}), ArgumentError);
  }

  TEST_CASE("span repr composition for unit and two-token spans") {
    nn::ParameterStore store;
    SpanEncoder enc(store, 4);
    store.initialize(1);
    // Equal head scores for every token.
    enc.head_weight().value.setZero();
    const Document d = two_sentence_doc();
    const auto emb = hash_embeddings(d, 4, 2);

    const SpanRepr unit = build_span_repr(enc, emb, Span{1, 1});
    CHECK(unit.g.size() == enc.output_dim());
    CHECK(unit.g.segment(0, 4) == unit.g.segment(4, 4));
    CHECK((unit.g.segment(8, 4) - unit.g.segment(0, 4)).norm() <= 1e-12);

    const SpanRepr pair = build_span_repr(enc, emb, Span{1, 2});
    const nn::Vector mean = 0.5 * (emb.vectors.row(1) + emb.vectors.row(2)).transpose();
    CHECK((pair.g.segment(8, 4) - mean).norm() <= 1e-12);
    CHECK_THROWS(build_span_repr(enc, emb, Span{4, 9}));
  }

  TEST_CASE("span encoder gradients match finite differences") {
    nn::ParameterStore store;
    SpanEncoder enc(store, 3);
    store.initialize(4);
    Rng rng(1);
    nn::Matrix tokens(6, 3);
    for (Eigen::Index i = 0; i < tokens.size(); ++i) tokens(i) = rng.uniform(-1, 1);
    const std::vector<Span> spans = {{0, 0}, {0, 2}, {1, 3}, {4, 5}, {2, 5}};
    nn::Matrix mix(static_cast<Eigen::Index>(spans.size()), enc.output_dim());
    for (Eigen::Index i = 0; i < mix.size(); ++i) mix(i) = rng.uniform(-1, 1);
    const auto result = nn::check_gradients(store, [&](nn::Graph& g) {
      nn::Var out = enc.encode(g, g.constant(tokens), spans);
      return nn::sum(nn::mul(out, g.constant(mix)));
    });
    CHECK(result.max_relative_error <= 1e-3);
  }
}
