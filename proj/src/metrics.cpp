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

#include "coref/metrics.hpp"

#include <map>
#include <tuple>

#include "coref/hungarian.hpp"

namespace coref {

namespace {

double ratio(double num, double den) { return den == 0.0 ? 0.0 : num / den; }

// Cluster index of every mention on one side.
std::map<Span, int> mention_index(const Clusters& clusters) {
  std::map<Span, int> index;
  for (std::size_t c = 0; c < clusters.size(); ++c) {
    for (const Span& s : clusters[c]) index.emplace(s, static_cast<int>(c));
  }
  return index;
}

std::size_t overlap(const Cluster& a, const std::map<Span, int>& index_b, int cluster_b) {
  std::size_t n = 0;
  for (const Span& s : a) {
    auto it = index_b.find(s);
    if (it != index_b.end() && it->second == cluster_b) ++n;
  }
  return n;
}

// MUC half: sum over key chains of |K| - partitions(K) and |K| - 1. Mentions
// missing from the response each form their own partition.
std::pair<double, double> muc_half(const Clusters& key, const Clusters& response) {
  const auto index = mention_index(response);
  double num = 0.0;
  double den = 0.0;
  for (const Cluster& k : key) {
    if (k.empty()) continue;
    std::map<int, int> parts;
    int unmatched = 0;
    for (const Span& s : k) {
      auto it = index.find(s);
      if (it == index.end()) {
        ++unmatched;
      } else {
        parts[it->second] += 1;
      }
    }
    const double partitions = static_cast<double>(parts.size() + unmatched);
    num += static_cast<double>(k.size()) - partitions;
    den += static_cast<double>(k.size()) - 1.0;
  }
  return {num, den};
}

// B-cubed half: sum over key mentions of |K n R| / |K|, with the mention
// scoring 0 when it is absent from the response.
std::pair<double, double> b_cubed_half(const Clusters& key, const Clusters& response) {
  const auto index = mention_index(response);
  double num = 0.0;
  double den = 0.0;
  for (const Cluster& k : key) {
    if (k.empty()) continue;
    std::map<int, int> counts;
    for (const Span& s : k) {
      auto it = index.find(s);
      if (it != index.end()) counts[it->second] += 1;
    }
    for (const auto& [c, n] : counts) {
      num += static_cast<double>(n) * static_cast<double>(n) / static_cast<double>(k.size());
    }
    den += static_cast<double>(k.size());
  }
  return {num, den};
}

}  // namespace

MetricCounts& MetricCounts::operator+=(const MetricCounts& other) {
  precision_num += other.precision_num;
  precision_den += other.precision_den;
  recall_num += other.recall_num;
  recall_den += other.recall_den;
  return *this;
}

double f1_score(double precision, double recall) {
  if (precision + recall == 0.0) return 0.0;
  return 2.0 * precision * recall / (precision + recall);
}

MetricScores MetricScores::from(const MetricCounts& c) {
  MetricScores s;
  s.precision = ratio(c.precision_num, c.precision_den);
  s.recall = ratio(c.recall_num, c.recall_den);
  s.f1 = f1_score(s.precision, s.recall);
  return s;
}

MetricCounts muc_counts(const Clusters& gold, const Clusters& pred) {
  MetricCounts c;
  std::tie(c.recall_num, c.recall_den) = muc_half(gold, pred);
  std::tie(c.precision_num, c.precision_den) = muc_half(pred, gold);
  return c;
}

MetricCounts b_cubed_counts(const Clusters& gold, const Clusters& pred) {
  MetricCounts c;
  std::tie(c.recall_num, c.recall_den) = b_cubed_half(gold, pred);
  std::tie(c.precision_num, c.precision_den) = b_cubed_half(pred, gold);
  return c;
}

double phi4(const Cluster& key, const Cluster& response) {
  if (key.empty() && response.empty()) return 0.0;
  const auto index = mention_index(Clusters{response});
  const double common = static_cast<double>(overlap(key, index, 0));
  return 2.0 * common / static_cast<double>(key.size() + response.size());
}

MetricCounts ceaf_phi4_counts(const Clusters& gold, const Clusters& pred) {
  Eigen::MatrixXd sim = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(gold.size()),
                                              static_cast<Eigen::Index>(pred.size()));
  const auto index = mention_index(pred);
  for (std::size_t i = 0; i < gold.size(); ++i) {
    for (std::size_t j = 0; j < pred.size(); ++j) {
      const double common = static_cast<double>(overlap(gold[i], index, static_cast<int>(j)));
      if (common > 0.0) {
        sim(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
            2.0 * common / static_cast<double>(gold[i].size() + pred[j].size());
      }
    }
  }
  const double total = max_weight_total(sim);
  MetricCounts c;
  c.precision_num = total;
  c.precision_den = static_cast<double>(pred.size());
  c.recall_num = total;
  c.recall_den = static_cast<double>(gold.size());
  return c;
}

MetricScores muc(const Clusters& gold, const Clusters& pred) {
  return MetricScores::from(muc_counts(gold, pred));
}

MetricScores b_cubed(const Clusters& gold, const Clusters& pred) {
  return MetricScores::from(b_cubed_counts(gold, pred));
}

MetricScores ceaf_phi4(const Clusters& gold, const Clusters& pred) {
  return MetricScores::from(ceaf_phi4_counts(gold, pred));
}

double avg_f1(double muc_f1, double b_cubed_f1, double ceaf_f1) {
  return (muc_f1 + b_cubed_f1 + ceaf_f1) / 3.0;
}

double avg_f1(const MetricsReport& r) { return avg_f1(r.muc.f1, r.b_cubed.f1, r.ceaf_phi4.f1); }

namespace {

nlohmann::json scores_json(const MetricScores& s) {
  return {{"precision", s.precision}, {"recall", s.recall}, {"f1", s.f1}};
}

MetricScores scores_from(const nlohmann::json& j) {
  MetricScores s;
  s.precision = j.at("precision").get<double>();
  s.recall = j.at("recall").get<double>();
  s.f1 = j.at("f1").get<double>();
  return s;
}

}  // namespace

nlohmann::json MetricsReport::to_json() const {
  return {{"muc", scores_json(muc)},
          {"b_cubed", scores_json(b_cubed)},
          {"ceaf_phi4", scores_json(ceaf_phi4)},
          {"avg_f1", avg_f1}};
}

MetricsReport MetricsReport::from_json(const nlohmann::json& j) {
  MetricsReport r;
  r.muc = scores_from(j.at("muc"));
  r.b_cubed = scores_from(j.at("b_cubed"));
  r.ceaf_phi4 = scores_from(j.at("ceaf_phi4"));
  r.avg_f1 = j.at("avg_f1").get<double>();
  return r;
}

void CorefEvaluator::add(const Clusters& gold, const Clusters& pred) {
  muc_ += muc_counts(gold, pred);
  b_cubed_ += b_cubed_counts(gold, pred);
  ceaf_ += ceaf_phi4_counts(gold, pred);
  ++docs_;
}

CorefEvaluator& CorefEvaluator::operator+=(const CorefEvaluator& other) {
  muc_ += other.muc_;
  b_cubed_ += other.b_cubed_;
  ceaf_ += other.ceaf_;
  docs_ += other.docs_;
  return *this;
}

MetricsReport CorefEvaluator::report() const {
  MetricsReport r;
  r.muc = MetricScores::from(muc_);
  r.b_cubed = MetricScores::from(b_cubed_);
  r.ceaf_phi4 = MetricScores::from(ceaf_);
  r.avg_f1 = coref::avg_f1(r);
  return r;
}

}  // namespace coref
