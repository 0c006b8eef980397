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

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include "doctest.h"

#include "coref/error.hpp"
#include "coref/ranker.hpp"
#include "support.hpp"

using namespace coref;
using namespace coref::testing;

namespace {

nn::Matrix random_matrix(Rng& rng, Eigen::Index r, Eigen::Index c) {
  nn::Matrix m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) m(i) = rng.uniform(-2.0, 2.0);
  return m;
}

// Reference greedy pruning: score order (stable on document order),
// skip crossings, stop at the budget.
std::vector<int> greedy_prune(const SpanCandidateSet& set, int budget) {
  std::vector<int> order(set.spans.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return set.mention_scores[a] > set.mention_scores[b]; });
  std::vector<int> kept;
  for (int i : order) {
    if (static_cast<int>(kept.size()) >= budget) break;
    bool ok = true;
    for (int k : kept) ok = ok && !set.spans[i].crosses(set.spans[k]);
    if (ok) kept.push_back(i);
  }
  std::sort(kept.begin(), kept.end());
  return kept;
}

// Connected components of the undirected antecedent graph.
std::vector<std::set<int>> components(const std::vector<int>& ante) {
  const int n = static_cast<int>(ante.size());
  std::vector<std::vector<int>> adj(static_cast<std::size_t>(n));
  for (int x = 0; x < n; ++x) {
    if (ante[x] >= 0) {
      adj[x].push_back(ante[x]);
      adj[ante[x]].push_back(x);
    }
  }
  std::vector<int> seen(static_cast<std::size_t>(n), 0);
  std::vector<std::set<int>> out;
  for (int s = 0; s < n; ++s) {
    if (seen[s]) continue;
    std::set<int> comp;
    std::vector<int> stack = {s};
    seen[s] = 1;
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      comp.insert(v);
      for (int w : adj[v]) {
        if (!seen[w]) {
          seen[w] = 1;
          stack.push_back(w);
        }
      }
    }
    out.push_back(comp);
  }
  return out;
}

}  // namespace

TEST_SUITE("ranker") {
  TEST_CASE("enumeration examples") {
    const auto one = enumerate_spans(plain_document({3}), 2);
    const std::vector<Span> expected = {{0, 0}, {0, 1}, {1, 1}, {1, 2}, {2, 2}};
    CHECK(one.spans == expected);

    const auto two = enumerate_spans(plain_document({2, 2}), 2);
    CHECK(std::find(two.spans.begin(), two.spans.end(), Span{1, 2}) == two.spans.end());
    CHECK(two.spans.size() == 6);
  }

  TEST_CASE("enumeration count matches the closed form") {
    Rng rng(31);
    for (int t = 0; t < 200; ++t) {
      std::vector<int> lens;
      const int n_sent = 1 + static_cast<int>(rng.below(5));
      for (int s = 0; s < n_sent; ++s) lens.push_back(1 + static_cast<int>(rng.below(12)));
      const int width = 1 + static_cast<int>(rng.below(6));
      std::size_t expected = 0;
      for (int len : lens) {
        for (int k = 1; k <= std::min(width, len); ++k) expected += static_cast<std::size_t>(len - k + 1);
      }
      const Document doc = plain_document(lens);
      const auto set = enumerate_spans(doc, width);
      CHECK(set.spans.size() == expected);
      CHECK(std::is_sorted(set.spans.begin(), set.spans.end()));
      const auto sent = doc.sentence_map();
      for (const Span& s : set.spans) {
        CHECK(s.end - s.start + 1 <= width);
        CHECK(sent[s.start] == sent[s.end]);
      }
    }
  }

  TEST_CASE("pruning rejects spans crossing a kept span") {
    SpanCandidateSet set;
    set.spans = {{0, 2}, {1, 3}, {2, 2}};
    set.mention_scores = {5.0, 4.0, 1.0};
    const auto kept = prune_spans(set, 1.0, 4, 100);
    CHECK(kept == std::vector<int>{0, 2});
  }

  TEST_CASE("pruning with a large ratio removes only partial overlaps") {
    Rng rng(2);
    const Document doc = plain_document({6, 5});
    auto set = enumerate_spans(doc, 3);
    for (std::size_t i = 0; i < set.spans.size(); ++i) set.mention_scores.push_back(rng.uniform());
    const auto kept = prune_spans(set, 100.0, doc.num_tokens(), 100000);
    std::set<int> kept_set(kept.begin(), kept.end());
    for (int i = 0; i < static_cast<int>(set.spans.size()); ++i) {
      if (kept_set.count(i)) continue;
      bool crosses_kept = false;
      for (int k : kept) crosses_kept = crosses_kept || set.spans[i].crosses(set.spans[k]);
      CHECK(crosses_kept);
    }
  }

  TEST_CASE("pruning agrees with a greedy reference") {
    Rng rng(17);
    for (int t = 0; t < 300; ++t) {
      std::vector<int> lens;
      const int n_sent = 1 + static_cast<int>(rng.below(4));
      for (int s = 0; s < n_sent; ++s) lens.push_back(1 + static_cast<int>(rng.below(9)));
      const Document doc = plain_document(lens);
      auto set = enumerate_spans(doc, 1 + static_cast<int>(rng.below(5)));
      for (std::size_t i = 0; i < set.spans.size(); ++i) {
        // Coarse values force ties.
        set.mention_scores.push_back(static_cast<double>(rng.below(4)));
      }
      const double ratio = rng.uniform(0.1, 1.0);
      const int cap = 1 + static_cast<int>(rng.below(20));
      const int budget = std::min(static_cast<int>(std::ceil(ratio * doc.num_tokens())), cap);
      const auto kept = prune_spans(set, ratio, doc.num_tokens(), cap);
      CHECK(kept == greedy_prune(set, budget));
      CHECK(static_cast<int>(kept.size()) <= budget);
    }
  }

  TEST_CASE("coarse selection keeps the top preceding spans") {
    Rng rng(5);
    for (int t = 0; t < 50; ++t) {
      const int n = 1 + static_cast<int>(rng.below(25));
      const int d = 3;
      std::vector<Span> spans;
      for (int i = 0; i < n; ++i) spans.push_back(Span{i, i});
      const nn::Matrix reprs = random_matrix(rng, n, d);
      const nn::Vector ms = random_matrix(rng, n, 1);
      const nn::Matrix w = random_matrix(rng, d, d);
      const int cap = 1 + static_cast<int>(rng.below(8));
      const AntecedentFrame frame = select_antecedents(spans, reprs, ms, w, cap);
      REQUIRE(frame.size() == n);
      for (int x = 0; x < n; ++x) {
        const auto& cand = frame.candidates[x];
        CHECK(static_cast<int>(cand.size()) == std::min(x, cap));
        CHECK(std::is_sorted(cand.begin(), cand.end(), std::greater<>()));
        auto coarse = [&](int y) {
          return ms(x) + ms(y) + reprs.row(x).dot(w * reprs.row(y).transpose());
        };
        double worst_kept = std::numeric_limits<double>::infinity();
        for (int y : cand) worst_kept = std::min(worst_kept, coarse(y));
        for (int y = 0; y < x; ++y) {
          if (std::find(cand.begin(), cand.end(), y) == cand.end()) {
            CHECK(coarse(y) <= worst_kept + 1e-12);
          }
        }
      }
    }
  }

  TEST_CASE("scores are the sum of mention and pair components") {
    Rng rng(9);
    for (int t = 0; t < 50; ++t) {
      const AntecedentFrame frame = random_frame(rng, 1 + static_cast<int>(rng.below(10)), 4);
      nn::Graph g;
      const nn::Matrix m = random_matrix(rng, frame.size(), 1);
      const nn::Matrix c = random_matrix(rng, static_cast<Eigen::Index>(frame.pair_anaphor.size()), 1);
      const nn::Matrix s = antecedent_scores(g.constant(m), g.constant(c), frame).value();
      REQUIRE(s.rows() == frame.size());
      REQUIRE(s.cols() == frame.columns());
      for (int x = 0; x < frame.size(); ++x) CHECK(s(x, 0) == 0.0);
      for (std::size_t p = 0; p < frame.pair_anaphor.size(); ++p) {
        const auto x = frame.pair_anaphor[p];
        const auto y = frame.pair_antecedent[p];
        CHECK(std::abs(s(x, frame.pair_column[p]) - (m(x) + m(y) + c(static_cast<Eigen::Index>(p)))) <= 1e-12);
      }
    }
  }

  TEST_CASE("zero scores give a uniform distribution and dummy decisions") {
    Rng rng(4);
    const AntecedentFrame frame = random_frame(rng, 8, 3);
    const nn::Matrix zeros = nn::Matrix::Zero(frame.size(), frame.columns());
    const nn::Matrix p = antecedent_distribution(zeros, frame);
    for (int x = 0; x < frame.size(); ++x) {
      const double k = static_cast<double>(frame.candidates[x].size()) + 1.0;
      for (int c = 0; c < frame.columns(); ++c) {
        CHECK(p(x, c) == doctest::Approx(frame.mask(x, c) ? 1.0 / k : 0.0));
      }
    }
    const auto ante = best_antecedents(zeros, frame);
    CHECK(std::all_of(ante.begin(), ante.end(), [](int a) { return a == -1; }));
    CHECK(decode_clusters(ante, frame.spans).empty());
  }

  TEST_CASE("distribution examples") {
    AntecedentFrame frame;
    frame.spans = {{0, 0}, {1, 1}, {2, 2}};
    frame.candidates = {{}, {}, {1, 0}};
    frame.finalize(2);
    const nn::Matrix p = antecedent_distribution(nn::Matrix::Zero(3, 3), frame);
    CHECK(p(0, 0) == 1.0);
    CHECK(p(1, 0) == 1.0);
    for (int c = 0; c < 3; ++c) CHECK(p(2, c) == doctest::Approx(1.0 / 3.0));
  }

  TEST_CASE("distribution rows sum to one") {
    Rng rng(12);
    for (int t = 0; t < 100; ++t) {
      const AntecedentFrame frame = random_frame(rng, 1 + static_cast<int>(rng.below(20)), 6);
      const nn::Matrix s = random_matrix(rng, frame.size(), frame.columns()) * 10.0;
      const nn::Matrix p = antecedent_distribution(s, frame);
      for (int x = 0; x < frame.size(); ++x) CHECK(std::abs(p.row(x).sum() - 1.0) <= 1e-9);
    }
  }

  TEST_CASE("argmax ties go to the dummy, then the nearest candidate") {
    AntecedentFrame frame;
    frame.spans = {{0, 0}, {1, 1}, {2, 2}, {3, 3}};
    frame.candidates = {{}, {0}, {1, 0}, {2, 1, 0}};
    frame.finalize(3);
    nn::Matrix s = nn::Matrix::Zero(4, 4);
    s(1, 1) = -1.0;
    s(2, 1) = 2.0;
    s(2, 2) = 2.0;
    s(3, 2) = 0.0;
    const auto ante = best_antecedents(s, frame);
    CHECK(ante == std::vector<int>{-1, -1, 1, -1});
  }

  TEST_CASE("chains decode into one cluster") {
    const std::vector<Span> spans = {{0, 0}, {2, 2}, {4, 4}};
    const Clusters c = decode_clusters({-1, 0, 1}, spans);
    REQUIRE(c.size() == 1);
    CHECK(c[0] == Cluster{{0, 0}, {2, 2}, {4, 4}});
  }

  TEST_CASE("cluster ids match connected components") {
    Rng rng(77);
    for (int t = 0; t < 300; ++t) {
      const int n = static_cast<int>(rng.below(15));
      std::vector<int> ante(static_cast<std::size_t>(n), -1);
      for (int x = 1; x < n; ++x) {
        if (rng.bernoulli(0.6)) ante[x] = static_cast<int>(rng.below(static_cast<std::uint64_t>(x)));
      }
      const auto ids = link_clusters(ante);
      const auto comps = components(ante);
      std::map<int, std::set<int>> by_id;
      for (int x = 0; x < n; ++x) by_id[ids[x]].insert(x);
      std::set<std::set<int>> got, want(comps.begin(), comps.end());
      for (auto& [id, m] : by_id) got.insert(m);
      CHECK(got == want);
      int next = 0;
      for (int x = 0; x < n; ++x) {
        if (ids[x] == next) ++next;
        CHECK(ids[x] < next);
      }
      std::vector<Span> spans;
      for (int i = 0; i < n; ++i) spans.push_back(Span{i, i});
      std::size_t multi = 0;
      for (const auto& comp : comps) multi += comp.size() >= 2 ? 1 : 0;
      CHECK(decode_clusters(ante, spans).size() == multi);
    }
  }

  TEST_CASE("gold cluster ids and genre ids") {
    const Clusters gold = {{{0, 1}, {5, 5}}, {{3, 3}}};
    CHECK(gold_cluster_ids({{0, 1}, {2, 2}, {3, 3}, {5, 5}}, gold) == std::vector<int>{0, -1, 1, 0});
    CHECK(genre_id("bc") == 0);
    CHECK(genre_id("wb") == 6);
    CHECK(genre_id("xx") == kNumGenres - 1);
  }

  TEST_CASE("meta features") {
    AntecedentFrame frame;
    frame.spans = {{0, 0}, {2, 3}, {6, 6}};
    frame.candidates = {{}, {0}, {1, 0}};
    frame.finalize(2);
    const std::vector<std::string> speakers = {"a", "a", "b", "b", "a", "a", "a"};
    const std::vector<int> segments = {0, 0, 0, 0, 1, 1, 1};
    const MetaFeatures f = meta_features(frame, speakers, "tc", segments);
    CHECK(f.same_speaker == nn::IndexVector{0, 0, 1});
    CHECK(f.distance == nn::IndexVector{0, 0, 1});
    CHECK(f.segment_distance == nn::IndexVector{0, 1, 1});
    CHECK(f.genre == nn::IndexVector{5, 5, 5});
  }

  TEST_CASE("frames reject candidates that do not precede the anaphor") {
    AntecedentFrame frame;
    frame.spans = {{0, 0}, {1, 1}};
    frame.candidates = {{1}, {}};
    CHECK_THROWS_AS(frame.finalize(3), ArgumentError);
    frame.candidates = {{}, {0}};
    CHECK_THROWS_AS(frame.finalize(0), DimensionError);
  }
}
