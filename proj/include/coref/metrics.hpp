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

#include "json.hpp"

#include "coref/corpus.hpp"

namespace coref {

// Numerators and denominators of one metric, summed across documents.
struct MetricCounts {
  double precision_num = 0.0;
  double precision_den = 0.0;
  double recall_num = 0.0;
  double recall_den = 0.0;

  MetricCounts& operator+=(const MetricCounts& other);
};

struct MetricScores {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;

  static MetricScores from(const MetricCounts& counts);
};

// Harmonic mean; 0 when both are 0.
double f1_score(double precision, double recall);

MetricCounts muc_counts(const Clusters& gold, const Clusters& pred);
MetricCounts b_cubed_counts(const Clusters& gold, const Clusters& pred);
MetricCounts ceaf_phi4_counts(const Clusters& gold, const Clusters& pred);

MetricScores muc(const Clusters& gold, const Clusters& pred);
MetricScores b_cubed(const Clusters& gold, const Clusters& pred);
MetricScores ceaf_phi4(const Clusters& gold, const Clusters& pred);

// phi4(K, R) = 2|K n R| / (|K| + |R|).
double phi4(const Cluster& key, const Cluster& response);

struct MetricsReport {
  MetricScores muc;
  MetricScores b_cubed;
  MetricScores ceaf_phi4;
  double avg_f1 = 0.0;

  nlohmann::json to_json() const;
  static MetricsReport from_json(const nlohmann::json& j);
};

double avg_f1(double muc_f1, double b_cubed_f1, double ceaf_f1);
double avg_f1(const MetricsReport& report);

// Corpus-level scorer: counts are summed over documents before the ratios
// are taken.
class CorefEvaluator {
 public:
  void add(const Clusters& gold, const Clusters& pred);
  CorefEvaluator& operator+=(const CorefEvaluator& other);
  MetricsReport report() const;
  int num_documents() const { return docs_; }

 private:
  MetricCounts muc_;
  MetricCounts b_cubed_;
  MetricCounts ceaf_;
  int docs_ = 0;
};

}  // namespace coref
