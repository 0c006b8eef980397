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

#include "coref/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "coref/error.hpp"

namespace coref {

void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, jobs)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto work = [&] {
    while (!failed.load()) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        failed = true;
      }
    }
  };
  std::vector<std::thread> threads;
  threads.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) threads.emplace_back(work);
  for (auto& t : threads) t.join();
  if (error) std::rethrow_exception(error);
}

std::vector<DocumentPrediction> predict_corpus(const CorefModel& model,
                                               const std::vector<Document>& docs,
                                               const EmbeddingProvider& embeddings,
                                               std::optional<HoiMethod> method, int jobs) {
  std::vector<DocumentPrediction> out(docs.size());
  parallel_for(docs.size(), jobs, [&](std::size_t i) {
    const TokenEmbeddings emb = embeddings.embed(docs[i]);
    out[i] = model.predict(docs[i], emb, method);
  });
  return out;
}

MetricsReport evaluate_predictions(const std::vector<Document>& gold,
                                   const std::vector<DocumentPrediction>& predictions) {
  std::map<std::string, const DocumentPrediction*> by_key;
  for (const auto& p : predictions) by_key[p.doc_key] = &p;
  CorefEvaluator evaluator;
  for (const Document& doc : gold) {
    auto it = by_key.find(doc.doc_key);
    if (it == by_key.end()) throw AlignmentError("no prediction for doc_key " + doc.doc_key);
    evaluator.add(doc.clusters, it->second->clusters);
  }
  return evaluator.report();
}

namespace {

nlohmann::json span_json(const Span& s) { return nlohmann::json::array({s.start, s.end}); }

Span span_from(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 2) throw FormatError("span must be [start, end]");
  return Span{j[0].get<int>(), j[1].get<int>()};
}

}  // namespace

nlohmann::json prediction_to_json(const DocumentPrediction& p) {
  nlohmann::json clusters = nlohmann::json::array();
  for (const Cluster& c : p.clusters) {
    nlohmann::json cj = nlohmann::json::array();
    for (const Span& s : c) cj.push_back(span_json(s));
    clusters.push_back(std::move(cj));
  }
  nlohmann::json spans = nlohmann::json::array();
  for (const Span& s : p.spans) spans.push_back(span_json(s));
  return {{"doc_key", p.doc_key},
          {"clusters", std::move(clusters)},
          {"top_spans", std::move(spans)},
          {"antecedents", p.antecedents},
          {"antecedents_pre_hoi", p.antecedents_pre_hoi}};
}

DocumentPrediction prediction_from_json(const nlohmann::json& j) {
  DocumentPrediction p;
  try {
    p.doc_key = j.at("doc_key").get<std::string>();
    for (const auto& cj : j.at("clusters")) {
      Cluster c;
      for (const auto& sj : cj) c.push_back(span_from(sj));
      p.clusters.push_back(std::move(c));
    }
    if (j.contains("top_spans")) {
      for (const auto& sj : j.at("top_spans")) p.spans.push_back(span_from(sj));
    }
    if (j.contains("antecedents")) p.antecedents = j.at("antecedents").get<std::vector<int>>();
    if (j.contains("antecedents_pre_hoi")) {
      p.antecedents_pre_hoi = j.at("antecedents_pre_hoi").get<std::vector<int>>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("bad prediction record: ") + e.what());
  }
  const std::size_t n = p.spans.size();
  auto check = [&](const std::vector<int>& a, const char* field) {
    if (a.empty()) return;
    if (a.size() != n) throw FormatError(p.doc_key + ": " + field + " length differs from top_spans");
    for (std::size_t x = 0; x < n; ++x) {
      if (a[x] < -1 || a[x] >= static_cast<int>(x)) {
        throw FormatError(p.doc_key + ": " + field + " must point to an earlier span or -1");
      }
    }
  };
  check(p.antecedents, "antecedents");
  check(p.antecedents_pre_hoi, "antecedents_pre_hoi");
  return p;
}

std::string predictions_to_jsonlines(const std::vector<DocumentPrediction>& predictions) {
  std::string out;
  for (const auto& p : predictions) {
    out += prediction_to_json(p).dump();
    out += '\n';
  }
  return out;
}

std::vector<DocumentPrediction> predictions_from_jsonlines(std::string_view text) {
  std::vector<DocumentPrediction> out;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError("prediction line " + std::to_string(line_no) + ": " + e.what());
    }
    out.push_back(prediction_from_json(j));
  }
  return out;
}

}  // namespace coref
