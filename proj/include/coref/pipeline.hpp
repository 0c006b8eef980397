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

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "coref/metrics.hpp"
#include "coref/model.hpp"

namespace coref {

// Runs fn(i) for i in [0, n) on up to jobs threads. Each index is handled
// exactly once; the first exception thrown is rethrown after all workers
// stop.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn);

std::vector<DocumentPrediction> predict_corpus(const CorefModel& model,
                                               const std::vector<Document>& docs,
                                               const EmbeddingProvider& embeddings,
                                               std::optional<HoiMethod> method = std::nullopt,
                                               int jobs = 1);

// Scores predictions against the gold documents with the same doc_keys.
// Throws AlignmentError when a gold document has no prediction.
MetricsReport evaluate_predictions(const std::vector<Document>& gold,
                                   const std::vector<DocumentPrediction>& predictions);

// Prediction dump line: {"doc_key", "clusters", "top_spans", "antecedents",
// "antecedents_pre_hoi"}; spans are [start, end] pairs.
nlohmann::json prediction_to_json(const DocumentPrediction& p);
DocumentPrediction prediction_from_json(const nlohmann::json& j);
std::string predictions_to_jsonlines(const std::vector<DocumentPrediction>& predictions);
std::vector<DocumentPrediction> predictions_from_jsonlines(std::string_view text);

}  // namespace coref
