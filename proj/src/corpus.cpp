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

#include "coref/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "coref/error.hpp"
#include "coref/log.hpp"
#include "json.hpp"

namespace coref {
namespace {

using nlohmann::json;

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

int parse_int(std::string_view s, const std::string& what) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw FormatError("expected integer for " + what + ", got '" + std::string(s) + "'");
  }
  return value;
}

bool is_blank(std::string_view line) {
  return std::all_of(line.begin(), line.end(),
                     [](char c) { return c == ' ' || c == '\t' || c == '\r'; });
}

// "#begin document (bc/cctv/00/cctv_0000); part 000" -> "bc/cctv/00/cctv_0000_0"
std::string doc_key_from_header(std::string_view line, int line_no) {
  auto open = line.find('(');
  auto close = line.find(')', open == std::string_view::npos ? 0 : open);
  if (open == std::string_view::npos || close == std::string_view::npos) {
    throw FormatError("line " + std::to_string(line_no) + ": malformed #begin document header");
  }
  std::string key(line.substr(open + 1, close - open - 1));
  auto part_pos = line.find("part", close);
  int part = 0;
  if (part_pos != std::string_view::npos) {
    auto fields = split_ws(line.substr(part_pos + 4));
    if (!fields.empty()) part = parse_int(fields[0], "part number");
  }
  return key + "_" + std::to_string(part);
}

struct ConllBuilder {
  Document doc;
  std::vector<std::string> sentence;
  std::map<int, std::vector<int>> open;  // cluster id -> stack of starts
  std::map<int, Cluster> clusters;
  int header_line = 0;

  int token_index() const {
    int n = static_cast<int>(sentence.size());
    for (const auto& s : doc.sentences) n += static_cast<int>(s.size());
    return n;
  }

  void flush_sentence() {
    if (!sentence.empty()) doc.sentences.push_back(std::move(sentence));
    sentence.clear();
  }

  void coref_column(std::string_view col, int line_no) {
    if (col == "-") return;
    const int tok = token_index();
    std::size_t i = 0;
    while (i <= col.size()) {
      auto bar = col.find('|', i);
      if (bar == std::string_view::npos) bar = col.size();
      std::string_view entry = col.substr(i, bar - i);
      i = bar + 1;
      if (entry.empty()) {
        throw ParseError(doc.doc_key + " line " + std::to_string(line_no) +
                         ": empty coreference entry");
      }
      bool opens = entry.front() == '(';
      bool closes = entry.back() == ')';
      std::string_view id_text = entry.substr(opens ? 1 : 0);
      if (closes) id_text.remove_suffix(1);
      if (!opens && !closes) {
        throw ParseError(doc.doc_key + " line " + std::to_string(line_no) +
                         ": coreference entry without bracket '" + std::string(entry) + "'");
      }
      int id = 0;
      try {
        id = parse_int(id_text, "cluster id");
      } catch (const FormatError& e) {
        throw ParseError(doc.doc_key + " line " + std::to_string(line_no) + ": " + e.what());
      }
      if (opens && closes) {
        clusters[id].push_back({tok, tok});
      } else if (opens) {
        open[id].push_back(tok);
      } else {
        auto it = open.find(id);
        if (it == open.end() || it->second.empty()) {
          throw ParseError(doc.doc_key + " line " + std::to_string(line_no) +
                           ": unbalanced bracket, closing " + std::to_string(id) +
                           " without opening");
        }
        clusters[id].push_back({it->second.back(), tok});
        it->second.pop_back();
      }
    }
  }

  Document finish(int line_no) {
    flush_sentence();
    for (const auto& [id, starts] : open) {
      if (!starts.empty()) {
        throw ParseError(doc.doc_key + " line " + std::to_string(line_no) +
                         ": unbalanced bracket, cluster " + std::to_string(id) +
                         " opened at token " + std::to_string(starts.back()) + " never closed");
      }
    }
    for (auto& [id, mentions] : clusters) doc.clusters.push_back(std::move(mentions));
    doc.clusters = canonical_clusters(std::move(doc.clusters));
    doc.genre = genre_from_doc_key(doc.doc_key);
    return std::move(doc);
  }
};

Span span_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2) throw FormatError("mention must be a [start, end] pair");
  return {j[0].get<int>(), j[1].get<int>()};
}

}  // namespace

Clusters canonical_clusters(Clusters clusters) {
  for (auto& c : clusters) std::sort(c.begin(), c.end());
  std::erase_if(clusters, [](const Cluster& c) { return c.empty(); });
  std::sort(clusters.begin(), clusters.end(),
            [](const Cluster& a, const Cluster& b) { return a.front() < b.front(); });
  return clusters;
}

int Document::num_tokens() const {
  int n = 0;
  for (const auto& s : sentences) n += static_cast<int>(s.size());
  return n;
}

std::vector<std::string> Document::tokens() const {
  std::vector<std::string> out;
  out.reserve(num_tokens());
  for (const auto& s : sentences) out.insert(out.end(), s.begin(), s.end());
  return out;
}

std::vector<int> Document::sentence_map() const {
  std::vector<int> out;
  out.reserve(num_tokens());
  for (int i = 0; i < static_cast<int>(sentences.size()); ++i) {
    out.insert(out.end(), sentences[i].size(), i);
  }
  return out;
}

std::size_t Document::num_mentions() const {
  std::size_t n = 0;
  for (const auto& c : clusters) n += c.size();
  return n;
}

void Document::validate() const {
  const int n = num_tokens();
  if (static_cast<int>(speakers.size()) != n) {
    throw FormatError(doc_key + ": speakers length " + std::to_string(speakers.size()) +
                      " != token count " + std::to_string(n));
  }
  std::set<Span> seen;
  for (const auto& c : clusters) {
    for (const auto& m : c) {
      if (m.start < 0 || m.start > m.end || m.end >= n) {
        throw FormatError(doc_key + ": mention [" + std::to_string(m.start) + ", " +
                          std::to_string(m.end) + "] out of range");
      }
      if (!seen.insert(m).second) {
        throw FormatError(doc_key + ": mention [" + std::to_string(m.start) + ", " +
                          std::to_string(m.end) + "] appears in more than one cluster");
      }
    }
  }
}

std::string genre_from_doc_key(std::string_view doc_key) {
  if (doc_key.size() < 2) return "xx";
  return std::string(doc_key.substr(0, 2));
}

std::vector<Document> parse_conll(std::string_view text) {
  std::vector<Document> docs;
  std::optional<ConllBuilder> cur;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;

    if (line.starts_with("#begin document")) {
      if (cur) throw ParseError(cur->doc.doc_key + " line " + std::to_string(line_no) +
                                ": nested #begin document");
      cur.emplace();
      cur->doc.doc_key = doc_key_from_header(line, line_no);
      cur->header_line = line_no;
      continue;
    }
    if (line.starts_with("#end document")) {
      if (!cur) throw ParseError("line " + std::to_string(line_no) + ": #end document without #begin");
      docs.push_back(cur->finish(line_no));
      cur.reset();
      continue;
    }
    if (is_blank(line)) {
      if (cur) cur->flush_sentence();
      continue;
    }
    if (line.front() == '#') continue;
    if (!cur) throw FormatError("line " + std::to_string(line_no) + ": token line outside a document");

    auto cols = split_ws(line);
    if (cols.size() < 12) {
      throw FormatError(cur->doc.doc_key + " line " + std::to_string(line_no) + ": expected at least 12 columns, got " +
                        std::to_string(cols.size()));
    }
    cur->coref_column(cols.back(), line_no);
    cur->sentence.emplace_back(cols[3]);
    cur->doc.speakers.emplace_back(cols[9]);
  }
  if (cur) {
    throw ParseError(cur->doc.doc_key + " line " + std::to_string(line_no) +
                     ": document not terminated by #end document");
  }
  return docs;
}

std::string emit_conll(const std::vector<Document>& docs) {
  std::ostringstream out;
  for (const auto& doc : docs) {
    // Split "<name>_<part>" back into the header form.
    std::string name = doc.doc_key;
    int part = 0;
    if (auto us = doc.doc_key.rfind('_'); us != std::string::npos) {
      auto tail = std::string_view(doc.doc_key).substr(us + 1);
      int p = 0;
      auto [ptr, ec] = std::from_chars(tail.data(), tail.data() + tail.size(), p);
      if (ec == std::errc() && ptr == tail.data() + tail.size() && !tail.empty()) {
        name = doc.doc_key.substr(0, us);
        part = p;
      }
    }
    const int n = doc.num_tokens();
    // Per token bracket entries. Opens go longest first and closes
    // shortest first so that properly nested mentions of one cluster
    // re-pair correctly under stack matching.
    std::vector<std::vector<std::pair<Span, int>>> opens(n), closes(n), units(n);
    for (int id = 0; id < static_cast<int>(doc.clusters.size()); ++id) {
      for (const auto& m : doc.clusters[id]) {
        if (m.start == m.end) {
          units[m.start].push_back({m, id});
        } else {
          opens[m.start].push_back({m, id});
          closes[m.end].push_back({m, id});
        }
      }
    }
    char part_buf[8];
    std::snprintf(part_buf, sizeof part_buf, "%03d", part);
    out << "#begin document (" << name << "); part " << part_buf << "\n";
    int tok = 0;
    for (const auto& sentence : doc.sentences) {
      for (int w = 0; w < static_cast<int>(sentence.size()); ++w, ++tok) {
        auto& o = opens[tok];
        auto& c = closes[tok];
        std::sort(o.begin(), o.end(), [](auto& a, auto& b) {
          return a.first.end != b.first.end ? a.first.end > b.first.end : a.second < b.second;
        });
        std::sort(c.begin(), c.end(), [](auto& a, auto& b) {
          return a.first.start != b.first.start ? a.first.start > b.first.start : a.second < b.second;
        });
        std::string coref;
        auto append = [&coref](const std::string& e) {
          if (!coref.empty()) coref += '|';
          coref += e;
        };
        for (auto& [m, id] : o) append("(" + std::to_string(id));
        for (auto& [m, id] : units[tok]) append("(" + std::to_string(id) + ")");
        for (auto& [m, id] : c) append(std::to_string(id) + ")");
        if (coref.empty()) coref = "-";
        const std::string& speaker = doc.speakers.at(tok);
        out << name << ' ' << part << ' ' << w << ' ' << sentence[w] << " - - - - - "
            << (speaker.empty() ? "-" : speaker) << " * " << coref << "\n";
      }
      out << "\n";
    }
    out << "#end document\n";
  }
  return out.str();
}

std::string to_jsonlines(const std::vector<Document>& docs) {
  std::string out;
  for (const auto& doc : docs) {
    json j;
    j["doc_key"] = doc.doc_key;
    j["genre"] = doc.genre;
    j["sentences"] = doc.sentences;
    json speakers = json::array();
    int tok = 0;
    for (const auto& s : doc.sentences) {
      json row = json::array();
      for (std::size_t i = 0; i < s.size(); ++i) row.push_back(doc.speakers.at(tok++));
      speakers.push_back(std::move(row));
    }
    j["speakers"] = std::move(speakers);
    json clusters = json::array();
    for (const auto& c : doc.clusters) {
      json cj = json::array();
      for (const auto& m : c) cj.push_back({m.start, m.end});
      clusters.push_back(std::move(cj));
    }
    j["clusters"] = std::move(clusters);
    out += j.dump();
    out += '\n';
  }
  return out;
}

std::vector<Document> from_jsonlines(std::string_view text) {
  std::vector<Document> docs;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (is_blank(line)) continue;
    Document doc;
    try {
      json j = json::parse(line);
      doc.doc_key = j.at("doc_key").get<std::string>();
      doc.sentences = j.at("sentences").get<std::vector<std::vector<std::string>>>();
      doc.genre = j.contains("genre") ? j["genre"].get<std::string>()
                                      : genre_from_doc_key(doc.doc_key);
      if (j.contains("speakers")) {
        for (const auto& s : j["speakers"]) {
          if (s.is_array()) {
            for (const auto& t : s) doc.speakers.push_back(t.get<std::string>());
          } else {
            doc.speakers.push_back(s.get<std::string>());
          }
        }
      } else {
        doc.speakers.assign(doc.num_tokens(), "-");
      }
      if (j.contains("clusters")) {
        for (const auto& c : j["clusters"]) {
          Cluster cluster;
          for (const auto& m : c) cluster.push_back(span_from_json(m));
          doc.clusters.push_back(std::move(cluster));
        }
      }
    } catch (const json::exception& e) {
      throw FormatError("jsonlines line " + std::to_string(line_no) + ": " + e.what());
    }
    doc.validate();
    docs.push_back(std::move(doc));
  }
  return docs;
}

std::vector<Segment> segment_document(const Document& doc, int max_len, bool warn) {
  if (max_len <= 0) throw ArgumentError("max_len must be positive, got " + std::to_string(max_len));
  std::vector<Segment> segments;
  int begin = 0;
  int cur_len = 0;
  auto close_current = [&]() {
    if (cur_len > 0) segments.push_back({doc.doc_key, begin, begin + cur_len - 1, max_len, false});
    begin += cur_len;
    cur_len = 0;
  };
  for (const auto& sentence : doc.sentences) {
    const int len = static_cast<int>(sentence.size());
    if (len == 0) continue;
    if (len > max_len) {
      close_current();
      if (warn) log::warning("sentence longer than max segment length kept as overflow segment",
                   {{"doc_key", doc.doc_key}, {"length", len}, {"max_len", max_len}});
      segments.push_back({doc.doc_key, begin, begin + len - 1, max_len, true});
      begin += len;
      continue;
    }
    if (cur_len + len > max_len) close_current();
    cur_len += len;
  }
  close_current();
  return segments;
}

std::vector<int> segment_map(const std::vector<Segment>& segments, int num_tokens) {
  std::vector<int> out(num_tokens, 0);
  for (int i = 0; i < static_cast<int>(segments.size()); ++i) {
    for (int t = segments[i].begin; t <= segments[i].end && t < num_tokens; ++t) out[t] = i;
  }
  return out;
}

}  // namespace coref
