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

#include "coref/trainer.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <numeric>

#include "coref/error.hpp"
#include "coref/log.hpp"
#include "coref/nn/ops.hpp"
#include "coref/pipeline.hpp"

namespace coref {

nn::Mask gold_antecedent_mask(const AntecedentFrame& frame, const std::vector<int>& gold_ids) {
  nn::Mask gold = nn::Mask::Constant(frame.size(), frame.columns(), false);
  for (int x = 0; x < frame.size(); ++x) {
    const int id = gold_ids[static_cast<std::size_t>(x)];
    bool any = false;
    if (id >= 0) {
      const auto& cands = frame.candidates[static_cast<std::size_t>(x)];
      for (std::size_t k = 0; k < cands.size(); ++k) {
        if (gold_ids[static_cast<std::size_t>(cands[k])] == id) {
          gold(x, static_cast<Eigen::Index>(k) + 1) = true;
          any = true;
        }
      }
    }
    if (!any) gold(x, 0) = true;
  }
  return gold;
}

nn::Var marginal_loss(nn::Var scores, const AntecedentFrame& frame,
                      const std::vector<int>& gold_ids) {
  if (static_cast<int>(gold_ids.size()) != frame.size()) {
    throw DimensionError("marginal_loss: gold ids do not match the frame");
  }
  const nn::Mask gold = gold_antecedent_mask(frame, gold_ids);
  nn::Var all = nn::row_log_sum_exp(scores, frame.mask);
  nn::Var marginal = nn::row_log_sum_exp(scores, gold);
  return nn::sum(nn::sub(all, marginal));
}

namespace {

struct Example {
  const Document* doc;
  TokenEmbeddings embeddings;
};

std::vector<nn::Matrix> snapshot(const nn::ParameterStore& store) {
  std::vector<nn::Matrix> values;
  for (const auto& p : store) values.push_back(p->value);
  return values;
}

void restore(nn::ParameterStore& store, const std::vector<nn::Matrix>& values) {
  std::size_t i = 0;
  for (auto& p : store) p->value = values[i++];
}

nn::OptimizerConfig optimizer_config(const TrainConfig& c, long total_steps) {
  nn::OptimizerConfig o;
  o.groups[0] = {c.lr_task, c.weight_decay_task};
  o.groups[1] = {c.lr_encoder, c.weight_decay_encoder};
  o.total_steps = c.linear_decay ? total_steps : 0;
  o.clip_norm = c.grad_clip;
  return o;
}

}  // namespace

TrainResult Trainer::train(const std::vector<Document>& train_docs,
                           const std::vector<Document>& dev_docs) const {
  if (config_.epochs < 0) throw ArgumentError("epochs must be >= 0");
  TrainResult result;
  result.model = std::make_unique<CorefModel>(config_.model, embeddings_.dim());
  CorefModel& model = *result.model;
  model.initialize(config_.seed);

  std::vector<Example> examples;
  examples.reserve(train_docs.size());
  for (const Document& d : train_docs) examples.push_back({&d, embeddings_.embed(d)});

  const long total_steps = static_cast<long>(config_.epochs) * static_cast<long>(examples.size());
  nn::Adam adam(optimizer_config(config_, total_steps));
  adam.init(model.params());

  Rng order_rng(mix64(config_.seed ^ 0x5f0e2a1dULL));
  Rng dropout_rng(mix64(config_.seed ^ 0x9d3b77c1ULL));
  std::vector<std::size_t> order(examples.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  std::vector<nn::Matrix> best = snapshot(model.params());
  nn::OptimizerState best_state = adam.state();
  double best_f1 = -std::numeric_limits<double>::infinity();

  for (int epoch = 1; epoch <= config_.epochs; ++epoch) {
    for (std::size_t i = order.size(); i > 1; --i) {
      std::swap(order[i - 1], order[order_rng.below(i)]);
    }
    double loss_sum = 0.0;
    for (std::size_t idx : order) {
      const Example& ex = examples[idx];
      model.params().zero_grad();
      try {
        nn::Graph g;
        ForwardOptions options;
        options.training = true;
        options.rng = &dropout_rng;
        ForwardResult fr = model.forward(g, *ex.doc, ex.embeddings, options);
        if (fr.frame.size() == 0) continue;
        const auto gold = gold_cluster_ids(fr.frame.spans, ex.doc->clusters);
        nn::Var loss = marginal_loss(fr.final_scores, fr.frame, gold);
        if (!std::isfinite(loss.scalar())) throw NumericError("non-finite loss");
        loss_sum += loss.scalar();
        g.backward(loss);
        adam.step(model.params());
        ++result.steps;
      } catch (const NumericError& e) {
        throw NumericError("training on " + ex.doc->doc_key + ": " + e.what());
      }
    }

    EpochRecord rec;
    rec.epoch = epoch;
    rec.mean_loss = examples.empty() ? 0.0 : loss_sum / static_cast<double>(examples.size());
    if (!dev_docs.empty()) {
      rec.dev_avg_f1 = evaluate_predictions(dev_docs, predict_corpus(model, dev_docs, embeddings_)).avg_f1;
    }
    result.history.push_back(rec);
    log::info("epoch", {{"epoch", epoch}, {"loss", rec.mean_loss}, {"dev_avg_f1", rec.dev_avg_f1}});
    if (on_epoch) on_epoch(rec);

    if (rec.dev_avg_f1 > best_f1) {
      best_f1 = rec.dev_avg_f1;
      best = snapshot(model.params());
      best_state = adam.state();
      result.best_epoch = epoch;
    }
    if (config_.stop_at_f1 > 0.0 && rec.dev_avg_f1 >= config_.stop_at_f1) break;
  }

  restore(model.params(), best);
  result.optimizer = std::move(best_state);
  result.best_dev_f1 = result.best_epoch > 0 ? best_f1 : 0.0;
  return result;
}

RunStats RunStats::from(std::vector<double> scores) {
  RunStats s;
  s.scores = std::move(scores);
  if (s.scores.empty()) return s;
  const double n = static_cast<double>(s.scores.size());
  s.mean = std::accumulate(s.scores.begin(), s.scores.end(), 0.0) / n;
  double sq = 0.0;
  for (double v : s.scores) sq += (v - s.mean) * (v - s.mean);
  s.stdev = std::sqrt(sq / n);
  s.min = *std::min_element(s.scores.begin(), s.scores.end());
  s.max = *std::max_element(s.scores.begin(), s.scores.end());
  // Rounding can push the mean of identical values a hair outside them.
  s.mean = std::clamp(s.mean, s.min, s.max);
  return s;
}

RunStats repeat_runs(const std::vector<Document>& train_docs, const std::vector<Document>& dev_docs,
                     const TrainConfig& config, const EmbeddingProvider& embeddings,
                     const std::vector<std::uint64_t>& seeds) {
  std::vector<double> scores;
  for (std::uint64_t seed : seeds) {
    TrainConfig c = config;
    c.seed = seed;
    scores.push_back(Trainer(c, embeddings).train(train_docs, dev_docs).best_dev_f1);
  }
  return RunStats::from(std::move(scores));
}

RunStats repeat_runs(const std::vector<Document>& train_docs, const std::vector<Document>& dev_docs,
                     const TrainConfig& config, const EmbeddingProvider& embeddings, int k) {
  if (k < 1) throw ArgumentError("repeat_runs needs k >= 1");
  std::vector<std::uint64_t> seeds;
  for (int i = 0; i < k; ++i) seeds.push_back(config.seed + static_cast<std::uint64_t>(i));
  return repeat_runs(train_docs, dev_docs, config, embeddings, seeds);
}

namespace {

constexpr char kCheckpointMagic[8] = {'C', 'R', 'C', 'K', 'P', 'T', '0', '1'};
constexpr std::uint32_t kCheckpointVersion = 1;

class Writer {
 public:
  void bytes(const void* data, std::size_t n) {
    out_.append(static_cast<const char*>(data), n);
  }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void str(const std::string& s) {
    u32(static_cast<std::uint32_t>(s.size()));
    bytes(s.data(), s.size());
  }
  void matrix(const nn::Matrix& m) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      for (Eigen::Index c = 0; c < m.cols(); ++c) f64(m(r, c));
    }
  }
  std::string take() { return std::move(out_); }

 private:
  std::string out_;
};

class Reader {
 public:
  explicit Reader(std::string_view in) : in_(in) {}
  const char* bytes(std::size_t n) {
    if (pos_ + n > in_.size()) throw FormatError("truncated checkpoint");
    const char* p = in_.data() + pos_;
    pos_ += n;
    return p;
  }
  std::uint32_t u32() {
    const auto* p = reinterpret_cast<const unsigned char*>(bytes(4));
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= std::uint32_t{p[i]} << (8 * i);
    return v;
  }
  std::uint64_t u64() {
    const auto* p = reinterpret_cast<const unsigned char*>(bytes(8));
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= std::uint64_t{p[i]} << (8 * i);
    return v;
  }
  double f64() { return std::bit_cast<double>(u64()); }
  std::string str() {
    const std::uint32_t n = u32();
    return std::string(bytes(n), n);
  }
  nn::Matrix matrix(Eigen::Index rows, Eigen::Index cols) {
    nn::Matrix m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
      for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = f64();
    }
    return m;
  }
  bool done() const { return pos_ == in_.size(); }

 private:
  std::string_view in_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string encode_checkpoint(const CorefModel& model, const TrainConfig& config,
                              const nn::OptimizerState& optimizer) {
  Writer w;
  w.bytes(kCheckpointMagic, sizeof kCheckpointMagic);
  w.u32(kCheckpointVersion);
  w.u64(config.seed);
  w.u32(static_cast<std::uint32_t>(model.token_dim()));
  w.str(to_key_values(config).dump());
  w.u32(static_cast<std::uint32_t>(model.params().size()));
  for (const auto& p : model.params()) {
    w.str(p->name);
    w.u32(static_cast<std::uint32_t>(p->value.rows()));
    w.u32(static_cast<std::uint32_t>(p->value.cols()));
    w.matrix(p->value);
  }
  w.u64(static_cast<std::uint64_t>(optimizer.step));
  const bool has_moments = !optimizer.first_moment.empty();
  w.u32(has_moments ? 1 : 0);
  if (has_moments) {
    for (std::size_t i = 0; i < optimizer.first_moment.size(); ++i) {
      w.matrix(optimizer.first_moment[i]);
      w.matrix(optimizer.second_moment[i]);
    }
  }
  return w.take();
}

void save_checkpoint(const std::filesystem::path& path, const CorefModel& model,
                     const TrainConfig& config, const nn::OptimizerState& optimizer) {
  const std::string bytes = encode_checkpoint(model, config, optimizer);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw LookupError("cannot write checkpoint " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw FormatError("failed writing checkpoint " + path.string());
}

Checkpoint decode_checkpoint(std::string_view bytes) {
  Reader r(bytes);
  if (std::memcmp(r.bytes(8), kCheckpointMagic, 8) != 0) throw FormatError("not a checkpoint file");
  const std::uint32_t version = r.u32();
  if (version != kCheckpointVersion) {
    throw FormatError("unsupported checkpoint version " + std::to_string(version));
  }
  Checkpoint ck;
  const std::uint64_t seed = r.u64();
  ck.token_dim = static_cast<int>(r.u32());
  ck.config = train_config_from(KeyValueConfig::parse(r.str()));
  ck.config.seed = seed;
  const std::uint32_t n = r.u32();
  for (std::uint32_t i = 0; i < n; ++i) {
    std::string name = r.str();
    const auto rows = static_cast<Eigen::Index>(r.u32());
    const auto cols = static_cast<Eigen::Index>(r.u32());
    ck.parameters.emplace_back(std::move(name), r.matrix(rows, cols));
  }
  ck.optimizer.step = static_cast<long>(r.u64());
  if (r.u32() != 0) {
    for (const auto& [name, value] : ck.parameters) {
      ck.optimizer.first_moment.push_back(r.matrix(value.rows(), value.cols()));
      ck.optimizer.second_moment.push_back(r.matrix(value.rows(), value.cols()));
    }
  }
  if (!r.done()) throw FormatError("trailing bytes in checkpoint");
  return ck;
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LookupError("cannot open checkpoint " + path.string());
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_checkpoint(bytes);
}

std::unique_ptr<CorefModel> model_from_checkpoint(const Checkpoint& ck) {
  auto model = std::make_unique<CorefModel>(ck.config.model, ck.token_dim);
  if (ck.parameters.size() != model->params().size()) {
    throw FormatError("checkpoint parameter count does not match the model");
  }
  for (const auto& [name, value] : ck.parameters) {
    nn::Parameter* p = model->params().find(name);
    if (p == nullptr) throw FormatError("checkpoint has unknown parameter " + name);
    if (p->value.rows() != value.rows() || p->value.cols() != value.cols()) {
      throw FormatError("shape mismatch for parameter " + name);
    }
    p->value = value;
  }
  return model;
}

}  // namespace coref
