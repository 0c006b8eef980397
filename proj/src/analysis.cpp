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

#include "coref/analysis.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>

#include "coref/error.hpp"
#include "coref/log.hpp"
#include "coref/pipeline.hpp"

namespace coref {

namespace {

double percent(long part, long whole) {
  return whole == 0 ? 0.0 : 100.0 * static_cast<double>(part) / static_cast<double>(whole);
}

std::map<Span, int> gold_index(const Clusters& gold) {
  std::map<Span, int> index;
  for (std::size_t c = 0; c < gold.size(); ++c) {
    for (const Span& s : gold[c]) index.emplace(s, static_cast<int>(c));
  }
  return index;
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

}  // namespace

double LinkChangeReport::w2c_percent() const { return percent(w2c, w2c + w2w); }
double LinkChangeReport::c2w_percent() const { return percent(c2w, c2w + c2c); }

LinkChangeReport& LinkChangeReport::operator+=(const LinkChangeReport& o) {
  w2c += o.w2c;
  c2w += o.c2w;
  c2c += o.c2c;
  w2w += o.w2w;
  return *this;
}

nlohmann::json LinkChangeReport::to_json() const {
  return {{"w2c", w2c},
          {"c2w", c2w},
          {"c2c", c2c},
          {"w2w", w2w},
          {"w2c_percent", w2c_percent()},
          {"c2w_percent", c2w_percent()}};
}

LinkChangeReport link_change(const std::vector<Span>& spans, const std::vector<int>& before,
                             const std::vector<int>& after, const Clusters& gold,
                             const LinkChangeOptions& options) {
  if (before.size() != spans.size() || after.size() != spans.size()) {
    throw AlignmentError("decision vectors do not match the span list");
  }
  const auto index = gold_index(gold);
  auto correct = [&](int x, int y) {
    auto ix = index.find(spans[static_cast<std::size_t>(x)]);
    auto iy = index.find(spans[static_cast<std::size_t>(y)]);
    return ix != index.end() && iy != index.end() && ix->second == iy->second;
  };
  LinkChangeReport r;
  for (std::size_t x = 0; x < spans.size(); ++x) {
    if (before[x] < 0 || after[x] < 0) continue;
    if (!options.include_nongold && index.count(spans[x]) == 0) continue;
    const bool b = correct(static_cast<int>(x), before[x]);
    const bool a = correct(static_cast<int>(x), after[x]);
    if (b && a) {
      ++r.c2c;
    } else if (b) {
      ++r.c2w;
    } else if (a) {
      ++r.w2c;
    } else {
      ++r.w2w;
    }
  }
  return r;
}

LinkChangeReport link_change(const std::vector<DocumentPrediction>& before,
                             const std::vector<DocumentPrediction>& after,
                             const std::vector<Document>& gold,
                             const LinkChangeOptions& options) {
  std::map<std::string, const DocumentPrediction*> after_by_key;
  for (const auto& p : after) after_by_key[p.doc_key] = &p;
  std::map<std::string, const Document*> gold_by_key;
  for (const auto& d : gold) gold_by_key[d.doc_key] = &d;
  if (before.size() != after.size()) throw AlignmentError("dumps hold different document counts");

  LinkChangeReport total;
  for (const auto& b : before) {
    auto ia = after_by_key.find(b.doc_key);
    if (ia == after_by_key.end()) throw AlignmentError("doc_key missing from after dump: " + b.doc_key);
    auto ig = gold_by_key.find(b.doc_key);
    if (ig == gold_by_key.end()) throw AlignmentError("doc_key missing from gold: " + b.doc_key);
    const DocumentPrediction& a = *ia->second;
    if (a.spans != b.spans) throw AlignmentError("span sets differ for " + b.doc_key);
    const auto& decisions_before = b.antecedents_pre_hoi.empty() ? b.antecedents : b.antecedents_pre_hoi;
    total += link_change(b.spans, decisions_before, a.antecedents, ig->second->clusters, options);
  }
  return total;
}

PronounClass PronounLexicon::classify(std::string_view token) const {
  const std::string t = lower(token);
  if (singular.count(t)) return PronounClass::kSingular;
  if (plural.count(t)) return PronounClass::kPlural;
  if (ambiguous.count(t)) return PronounClass::kAmbiguous;
  return PronounClass::kNone;
}

PronounLexicon PronounLexicon::english() {
  PronounLexicon l;
  l.singular = {"he", "him", "his", "she", "her", "hers", "it", "its", "i", "me", "my", "mine"};
  l.plural = {"they", "them", "their", "theirs", "we", "us", "our", "ours"};
  l.ambiguous = {"you", "your", "yours"};
  return l;
}

PronounLexicon PronounLexicon::from_json(const nlohmann::json& j) {
  PronounLexicon l;
  auto read = [&](const char* key, std::set<std::string>& out) {
    if (!j.contains(key)) throw FormatError(std::string("pronoun lexicon lacks \"") + key + "\"");
    for (const auto& w : j.at(key)) out.insert(lower(w.get<std::string>()));
  };
  try {
    read("singular", l.singular);
    read("plural", l.plural);
    read("ambiguous", l.ambiguous);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("bad pronoun lexicon: ") + e.what());
  }
  return l;
}

PronounLexicon PronounLexicon::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LookupError("cannot open pronoun lexicon " + path.string());
  try {
    return from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

PronounReport& PronounReport::operator+=(const PronounReport& o) {
  singular_to_plural += o.singular_to_plural;
  plural_to_singular += o.plural_to_singular;
  false_link += o.false_link;
  wrong_link += o.wrong_link;
  both_clusters += o.both_clusters;
  both_clusters_ambiguous += o.both_clusters_ambiguous;
  return *this;
}

nlohmann::json PronounReport::to_json() const {
  return {{"sp", singular_to_plural},
          {"ps", plural_to_singular},
          {"fl", false_link},
          {"wl", wrong_link},
          {"bc", both_clusters},
          {"bc_ambiguous", both_clusters_ambiguous}};
}

PronounReport pronoun_analysis(const DocumentPrediction& pred, const Document& gold,
                               const PronounLexicon& lexicon) {
  const auto tokens = gold.tokens();
  auto classify = [&](const Span& s) {
    if (s.start != s.end || s.start < 0 || s.start >= static_cast<int>(tokens.size())) {
      return PronounClass::kNone;
    }
    return lexicon.classify(tokens[static_cast<std::size_t>(s.start)]);
  };
  auto personal = [](PronounClass c) {
    return c == PronounClass::kSingular || c == PronounClass::kPlural;
  };
  const auto index = gold_index(gold.clusters);

  PronounReport r;
  for (std::size_t x = 0; x < pred.antecedents.size() && x < pred.spans.size(); ++x) {
    const int y = pred.antecedents[x];
    if (y < 0) continue;
    const Span& anaphor = pred.spans[x];
    const Span& antecedent = pred.spans[static_cast<std::size_t>(y)];
    const PronounClass cx = classify(anaphor);
    const PronounClass cy = classify(antecedent);
    if (!personal(cx) || !personal(cy)) continue;
    if (cx == PronounClass::kSingular && cy == PronounClass::kPlural) ++r.singular_to_plural;
    if (cx == PronounClass::kPlural && cy == PronounClass::kSingular) ++r.plural_to_singular;
    auto ix = index.find(anaphor);
    if (ix == index.end()) {
      ++r.false_link;
      continue;
    }
    auto iy = index.find(antecedent);
    if (iy == index.end() || iy->second != ix->second) ++r.wrong_link;
  }

  for (const Cluster& c : pred.clusters) {
    bool singular = false;
    bool plural = false;
    bool ambiguous = false;
    for (const Span& s : c) {
      switch (classify(s)) {
        case PronounClass::kSingular: singular = true; break;
        case PronounClass::kPlural: plural = true; break;
        case PronounClass::kAmbiguous: ambiguous = true; break;
        case PronounClass::kNone: break;
      }
    }
    if (singular && plural) {
      ++r.both_clusters;
      if (ambiguous) ++r.both_clusters_ambiguous;
    }
  }
  return r;
}

PronounReport pronoun_analysis(const std::vector<DocumentPrediction>& preds,
                               const std::vector<Document>& gold, const PronounLexicon& lexicon) {
  std::map<std::string, const Document*> gold_by_key;
  for (const auto& d : gold) gold_by_key[d.doc_key] = &d;
  PronounReport total;
  for (const auto& p : preds) {
    auto it = gold_by_key.find(p.doc_key);
    if (it == gold_by_key.end()) throw AlignmentError("doc_key missing from gold: " + p.doc_key);
    total += pronoun_analysis(p, *it->second, lexicon);
  }
  return total;
}

nlohmann::json HoiOffReport::to_json() const {
  return {{"method", to_string(method)},
          {"with_hoi", with_hoi.to_json()},
          {"without_hoi", without_hoi.to_json()},
          {"drop", drop}};
}

HoiOffReport hoi_off_eval(const CorefModel& model, const std::vector<Document>& docs,
                          const EmbeddingProvider& embeddings, int jobs) {
  HoiOffReport r;
  r.method = model.config().hoi.method;
  if (r.method == HoiMethod::kNone) {
    log::warning("model has no higher-order stage; turning it off changes nothing");
  }
  r.with_hoi = evaluate_predictions(docs, predict_corpus(model, docs, embeddings, std::nullopt, jobs));
  r.without_hoi =
      evaluate_predictions(docs, predict_corpus(model, docs, embeddings, HoiMethod::kNone, jobs));
  r.drop = r.with_hoi.avg_f1 - r.without_hoi.avg_f1;
  return r;
}

}  // namespace coref
