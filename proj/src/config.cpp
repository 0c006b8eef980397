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

#include "coref/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

#include "coref/error.hpp"

namespace coref {
namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

int to_int(const std::string& key, const std::string& v) {
  int out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) throw ArgumentError(key + ": expected integer, got '" + v + "'");
  return out;
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) throw ArgumentError(key + ": expected unsigned integer, got '" + v + "'");
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    double d = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ArgumentError(key + ": expected number, got '" + v + "'");
  }
}

std::string fmt_double(double d) {
  std::ostringstream s;
  s.precision(17);
  s << d;
  return s.str();
}

}  // namespace

KeyValueConfig KeyValueConfig::parse(std::string_view text) {
  KeyValueConfig cfg;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ArgumentError("config line " + std::to_string(line_no) + ": expected key = value");
    }
    cfg.set(std::string(trim(line.substr(0, eq))), std::string(trim(line.substr(eq + 1))));
  }
  return cfg;
}

KeyValueConfig KeyValueConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ArgumentError("cannot read config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

std::string KeyValueConfig::dump() const {
  std::string out;
  for (const auto& [k, v] : entries_) out += k + " = " + v + "\n";
  return out;
}

void KeyValueConfig::merge(const KeyValueConfig& other) {
  for (const auto& [k, v] : other.entries_) entries_[k] = v;
}

TrainConfig train_config_from(const KeyValueConfig& kv) {
  TrainConfig c;
  ModelConfig& m = c.model;
  using Setter = std::function<void(const std::string&, const std::string&)>;
  const std::map<std::string, Setter> setters = {
      {"epochs", [&](auto& k, auto& v) { c.epochs = to_int(k, v); }},
      {"dropout", [&](auto& k, auto& v) { m.dropout = to_double(k, v); }},
      {"lr.task", [&](auto& k, auto& v) { c.lr_task = to_double(k, v); }},
      {"lr.encoder", [&](auto& k, auto& v) { c.lr_encoder = to_double(k, v); }},
      {"lr.decay", [&](auto& k, auto& v) {
         if (v != "linear" && v != "none") throw ArgumentError(k + ": expected linear|none");
         c.linear_decay = v == "linear";
       }},
      {"weight_decay.task", [&](auto& k, auto& v) { c.weight_decay_task = to_double(k, v); }},
      {"weight_decay.encoder", [&](auto& k, auto& v) { c.weight_decay_encoder = to_double(k, v); }},
      {"grad_clip", [&](auto& k, auto& v) { c.grad_clip = to_double(k, v); }},
      {"seed", [&](auto& k, auto& v) { c.seed = to_u64(k, v); }},
      {"train.stop_at_f1", [&](auto& k, auto& v) { c.stop_at_f1 = to_double(k, v); }},
      {"model.ffnn_size", [&](auto& k, auto& v) { m.ffnn_size = to_int(k, v); }},
      {"model.ffnn_depth", [&](auto& k, auto& v) { m.ffnn_depth = to_int(k, v); }},
      {"model.feature_dim", [&](auto& k, auto& v) { m.feature_dim = to_int(k, v); }},
      {"model.max_span_width", [&](auto& k, auto& v) { m.max_span_width = to_int(k, v); }},
      {"model.top_span_ratio", [&](auto& k, auto& v) { m.top_span_ratio = to_double(k, v); }},
      {"model.max_top_spans", [&](auto& k, auto& v) { m.max_top_spans = to_int(k, v); }},
      {"model.max_antecedents", [&](auto& k, auto& v) { m.max_antecedents = to_int(k, v); }},
      {"model.max_seg_len", [&](auto& k, auto& v) { m.max_segment_len = to_int(k, v); }},
      {"gate.init", [&](auto& k, auto& v) {
         if (v != "glorot" && v != "keep") throw ArgumentError(k + ": expected glorot|keep");
         m.gate_init = v;
       }},
      {"hoi.method", [&](auto&, auto& v) { m.hoi.method = parse_hoi_method(v); }},
      {"hoi.rounds", [&](auto& k, auto& v) { m.hoi.rounds = to_int(k, v); }},
      {"cm.order", [&](auto&, auto& v) { m.hoi.cm_order = parse_cm_order(v); }},
      {"cm.reduce", [&](auto&, auto& v) { m.hoi.cm_reduce = parse_cm_reduce(v); }},
      {"ee.max_spans", [&](auto& k, auto& v) { m.hoi.ee_max_spans = to_int(k, v); }},
      {"embed.provider", [&](auto& k, auto& v) {
         if (v != "hash" && v != "file") throw ArgumentError(k + ": expected hash|file");
         c.embedding.provider = v;
       }},
      {"embed.path", [&](auto&, auto& v) { c.embedding.path = v; }},
      {"embed.dim", [&](auto& k, auto& v) { c.embedding.dim = to_int(k, v); }},
      {"embed.seed", [&](auto& k, auto& v) { c.embedding.seed = to_u64(k, v); }},
  };
  for (const auto& [key, value] : kv.entries()) {
    auto it = setters.find(key);
    if (it == setters.end()) throw ArgumentError("unknown config key '" + key + "'");
    it->second(key, value);
  }
  if (c.epochs < 0) throw ArgumentError("epochs must be >= 0");
  if (c.lr_task <= 0 || c.lr_encoder <= 0) throw ArgumentError("learning rates must be > 0");
  if (m.dropout < 0 || m.dropout >= 1) throw ArgumentError("dropout must be in [0, 1)");
  if (m.ffnn_size < 1 || m.ffnn_depth < 0) throw ArgumentError("invalid ffnn shape");
  if (m.max_span_width < 1) throw ArgumentError("model.max_span_width must be >= 1");
  if (m.max_antecedents < 0) throw ArgumentError("model.max_antecedents must be >= 0");
  if (m.max_segment_len < 1) throw ArgumentError("model.max_seg_len must be >= 1");
  if (m.hoi.rounds < 1) throw ArgumentError("hoi.rounds must be >= 1");
  if (m.hoi.ee_max_spans < 1) throw ArgumentError("ee.max_spans must be >= 1");
  if (c.embedding.dim < 1) throw ArgumentError("embed.dim must be >= 1");
  return c;
}

KeyValueConfig to_key_values(const TrainConfig& c) {
  const ModelConfig& m = c.model;
  KeyValueConfig kv;
  kv.set("epochs", std::to_string(c.epochs));
  kv.set("dropout", fmt_double(m.dropout));
  kv.set("lr.task", fmt_double(c.lr_task));
  kv.set("lr.encoder", fmt_double(c.lr_encoder));
  kv.set("lr.decay", c.linear_decay ? "linear" : "none");
  kv.set("weight_decay.task", fmt_double(c.weight_decay_task));
  kv.set("weight_decay.encoder", fmt_double(c.weight_decay_encoder));
  kv.set("grad_clip", fmt_double(c.grad_clip));
  kv.set("seed", std::to_string(c.seed));
  kv.set("train.stop_at_f1", fmt_double(c.stop_at_f1));
  kv.set("model.ffnn_size", std::to_string(m.ffnn_size));
  kv.set("model.ffnn_depth", std::to_string(m.ffnn_depth));
  kv.set("model.feature_dim", std::to_string(m.feature_dim));
  kv.set("model.max_span_width", std::to_string(m.max_span_width));
  kv.set("model.top_span_ratio", fmt_double(m.top_span_ratio));
  kv.set("model.max_top_spans", std::to_string(m.max_top_spans));
  kv.set("model.max_antecedents", std::to_string(m.max_antecedents));
  kv.set("model.max_seg_len", std::to_string(m.max_segment_len));
  kv.set("gate.init", m.gate_init);
  kv.set("hoi.method", to_string(m.hoi.method));
  kv.set("hoi.rounds", std::to_string(m.hoi.rounds));
  kv.set("cm.order", to_string(m.hoi.cm_order));
  kv.set("cm.reduce", to_string(m.hoi.cm_reduce));
  kv.set("ee.max_spans", std::to_string(m.hoi.ee_max_spans));
  kv.set("embed.provider", c.embedding.provider);
  kv.set("embed.path", c.embedding.path);
  kv.set("embed.dim", std::to_string(c.embedding.dim));
  kv.set("embed.seed", std::to_string(c.embedding.seed));
  return kv;
}

}  // namespace coref
