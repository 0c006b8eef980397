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

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>

#include "coref/hoi.hpp"

namespace coref {

// Flat "key = value" document; '#' starts a comment.
class KeyValueConfig {
 public:
  static KeyValueConfig parse(std::string_view text);
  static KeyValueConfig load(const std::filesystem::path& path);

  std::string dump() const;

  void set(const std::string& key, std::string value) { entries_[key] = std::move(value); }
  bool has(const std::string& key) const { return entries_.count(key) > 0; }
  const std::map<std::string, std::string>& entries() const { return entries_; }

  // Copies every entry of other over this one.
  void merge(const KeyValueConfig& other);

 private:
  std::map<std::string, std::string> entries_;
};

struct ModelConfig {
  int ffnn_size = 1000;
  int ffnn_depth = 2;
  double dropout = 0.3;
  int feature_dim = 20;
  int max_span_width = 30;
  double top_span_ratio = 0.4;
  int max_top_spans = 3900;
  int max_antecedents = 50;
  int max_segment_len = 384;
  std::string gate_init = "glorot";  // glorot | keep (gate saturated at f = 1)
  HoiConfig hoi;
};

struct EmbeddingConfig {
  std::string provider = "hash";  // hash | file
  std::string path;
  int dim = 64;
  std::uint64_t seed = 0;
};

struct TrainConfig {
  int epochs = 24;
  double lr_task = 3e-4;
  double lr_encoder = 1e-5;
  double weight_decay_task = 0.0;
  double weight_decay_encoder = 1e-2;
  bool linear_decay = true;
  double grad_clip = 1.0;
  std::uint64_t seed = 1;
  // Stop once the dev Avg-F1 reaches this value; 0 disables.
  double stop_at_f1 = 0.0;
  ModelConfig model;
  EmbeddingConfig embedding;
};

// Unknown keys and malformed values raise ArgumentError.
TrainConfig train_config_from(const KeyValueConfig& kv);
KeyValueConfig to_key_values(const TrainConfig& config);

}  // namespace coref
