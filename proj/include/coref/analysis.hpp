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

#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"

#include "coref/metrics.hpp"
#include "coref/model.hpp"

namespace coref {

// Link changes between two decision passes over the same spans. Rows are
// the correctness before, columns after: W2C = wrong then correct, etc.
struct LinkChangeReport {
  long w2c = 0;
  long c2w = 0;
  long c2c = 0;
  long w2w = 0;

  long total() const { return w2c + c2w + c2c + w2w; }
  // W2C over the "wrong before" row, C2W over the "correct before" row.
  double w2c_percent() const;
  double c2w_percent() const;

  LinkChangeReport& operator+=(const LinkChangeReport& other);
  bool operator==(const LinkChangeReport&) const = default;
  nlohmann::json to_json() const;
};

struct LinkChangeOptions {
  // Count mentions that match no gold span (always wrong) instead of
  // skipping them.
  bool include_nongold = true;
};

// A mention is counted when it chose a non-dummy antecedent in both passes.
// A decision is correct when both spans sit in the same gold cluster.
LinkChangeReport link_change(const std::vector<Span>& spans, const std::vector<int>& before,
                             const std::vector<int>& after, const Clusters& gold,
                             const LinkChangeOptions& options = {});

// Compares the pre-refinement decisions of before (its final decisions
// when none were recorded) with the final decisions of after. Throws
// AlignmentError when the dumps disagree on doc_keys or spans.
LinkChangeReport link_change(const std::vector<DocumentPrediction>& before,
                             const std::vector<DocumentPrediction>& after,
                             const std::vector<Document>& gold,
                             const LinkChangeOptions& options = {});

enum class PronounClass { kNone, kSingular, kPlural, kAmbiguous };

struct PronounLexicon {
  std::set<std::string> singular;
  std::set<std::string> plural;
  std::set<std::string> ambiguous;

  // Case-insensitive.
  PronounClass classify(std::string_view token) const;

  static PronounLexicon english();
  // JSON object with "singular", "plural" and "ambiguous" string arrays.
  static PronounLexicon from_json(const nlohmann::json& j);
  static PronounLexicon load(const std::filesystem::path& path);
};

struct PronounReport {
  long singular_to_plural = 0;  // SP
  long plural_to_singular = 0;  // PS
  long false_link = 0;          // FL
  long wrong_link = 0;          // WL
  long both_clusters = 0;       // BC
  long both_clusters_ambiguous = 0;

  PronounReport& operator+=(const PronounReport& other);
  bool operator==(const PronounReport&) const = default;
  nlohmann::json to_json() const;
};

// Pronoun mentions are single-token spans whose token is in the lexicon.
// SP, PS, FL and WL look at links between two non-ambiguous pronouns; BC
// counts predicted clusters holding both a singular and a plural pronoun.
PronounReport pronoun_analysis(const DocumentPrediction& pred, const Document& gold,
                               const PronounLexicon& lexicon);
PronounReport pronoun_analysis(const std::vector<DocumentPrediction>& preds,
                               const std::vector<Document>& gold, const PronounLexicon& lexicon);

struct HoiOffReport {
  HoiMethod method = HoiMethod::kNone;
  MetricsReport with_hoi;
  MetricsReport without_hoi;
  double drop = 0.0;  // avg_f1 with minus without

  nlohmann::json to_json() const;
};

// Evaluates the model as configured and again with the higher-order stage
// disabled on the same parameters.
HoiOffReport hoi_off_eval(const CorefModel& model, const std::vector<Document>& docs,
                          const EmbeddingProvider& embeddings, int jobs = 1);

}  // namespace coref
