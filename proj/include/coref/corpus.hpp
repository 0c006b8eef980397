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

#include <compare>
#include <string>
#include <string_view>
#include <vector>

namespace coref {

// Inclusive token span over the flattened document.
struct Span {
  int start = 0;
  int end = 0;

  int width() const { return end - start + 1; }
  bool contains(const Span& o) const { return start <= o.start && o.end <= end; }
  // True when the spans overlap without one nesting inside the other.
  bool crosses(const Span& o) const {
    return (start < o.start && o.start <= end && end < o.end) ||
           (o.start < start && start <= o.end && o.end < end);
  }

  auto operator<=>(const Span&) const = default;
};

using Cluster = std::vector<Span>;
using Clusters = std::vector<Cluster>;

// Sorts mentions within each cluster and clusters by their first mention.
Clusters canonical_clusters(Clusters clusters);

struct Document {
  std::string doc_key;
  std::string genre;
  std::vector<std::vector<std::string>> sentences;
  std::vector<std::string> speakers;  // one per token
  Clusters clusters;

  int num_tokens() const;
  std::vector<std::string> tokens() const;
  // Sentence index for every token.
  std::vector<int> sentence_map() const;
  std::size_t num_mentions() const;

  // Throws FormatError when an invariant is violated.
  void validate() const;

  bool operator==(const Document&) const = default;
};

// Genre from the first two characters of a doc_key, "xx" when unavailable.
std::string genre_from_doc_key(std::string_view doc_key);

// Reads *_conll column files. Only the token (3), speaker (9) and the
// final coreference column are used. Clusters come back canonical.
std::vector<Document> parse_conll(std::string_view text);

// Writes 12-column CoNLL text that parse_conll reads back.
std::string emit_conll(const std::vector<Document>& docs);

std::string to_jsonlines(const std::vector<Document>& docs);
std::vector<Document> from_jsonlines(std::string_view text);

struct Segment {
  std::string doc_key;
  int begin = 0;  // inclusive
  int end = 0;    // inclusive
  int max_len = 0;
  bool overflow = false;  // a single sentence longer than max_len

  int size() const { return end - begin + 1; }
  bool operator==(const Segment&) const = default;
};

// Greedy packing of whole sentences into segments of at most max_len
// tokens. A sentence longer than max_len becomes its own overflow segment
// and a warning is logged.
std::vector<Segment> segment_document(const Document& doc, int max_len, bool warn = true);

// Segment index for every token.
std::vector<int> segment_map(const std::vector<Segment>& segments, int num_tokens);

}  // namespace coref
