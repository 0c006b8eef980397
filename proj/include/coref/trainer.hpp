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
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "coref/config.hpp"
#include "coref/model.hpp"
#include "coref/nn/optimizer.hpp"

namespace coref {

// Gold antecedent mask over the frame's columns: candidates in the
// anaphor's gold cluster, or the dummy column alone when there are none.
nn::Mask gold_antecedent_mask(const AntecedentFrame& frame, const std::vector<int>& gold_ids);

// -sum_x log sum_{y in GOLD(x)} P(y | x), as a 1 x 1 node.
nn::Var marginal_loss(nn::Var scores, const AntecedentFrame& frame,
                      const std::vector<int>& gold_ids);

struct EpochRecord {
  int epoch = 0;
  double mean_loss = 0.0;
  double dev_avg_f1 = 0.0;
};

struct TrainResult {
  std::unique_ptr<CorefModel> model;  // parameters of the best dev epoch
  nn::OptimizerState optimizer;       // optimizer state at that epoch
  std::vector<EpochRecord> history;
  int best_epoch = 0;  // 0 when no epoch ran
  double best_dev_f1 = 0.0;
  long steps = 0;
};

class Trainer {
 public:
  Trainer(TrainConfig config, const EmbeddingProvider& embeddings)
      : config_(std::move(config)), embeddings_(embeddings) {}

  // One optimizer step per document, shuffled each epoch. Dev Avg-F1 is
  // measured after every epoch and the best epoch is kept. Throws
  // NumericError naming the document on a non-finite loss.
  TrainResult train(const std::vector<Document>& train_docs,
                    const std::vector<Document>& dev_docs) const;

  // Called after every epoch.
  std::function<void(const EpochRecord&)> on_epoch;

  const TrainConfig& config() const { return config_; }

 private:
  TrainConfig config_;
  const EmbeddingProvider& embeddings_;
};

struct RunStats {
  std::vector<double> scores;
  double mean = 0.0;
  double stdev = 0.0;  // population standard deviation
  double min = 0.0;
  double max = 0.0;

  static RunStats from(std::vector<double> scores);
};

// Trains k models with seeds config.seed, config.seed + 1, ... and reports
// their best dev Avg-F1.
RunStats repeat_runs(const std::vector<Document>& train_docs, const std::vector<Document>& dev_docs,
                     const TrainConfig& config, const EmbeddingProvider& embeddings, int k = 5);

// Same with explicit seeds.
RunStats repeat_runs(const std::vector<Document>& train_docs, const std::vector<Document>& dev_docs,
                     const TrainConfig& config, const EmbeddingProvider& embeddings,
                     const std::vector<std::uint64_t>& seeds);

// Binary checkpoint: "CRCKPT01", u32 version, u64 seed, u32 token dim,
// the config as key-value text, every parameter by name with its shape and
// float64 values, then the optimizer step and moments. Little-endian.
struct Checkpoint {
  TrainConfig config;
  int token_dim = 0;
  std::vector<std::pair<std::string, nn::Matrix>> parameters;
  nn::OptimizerState optimizer;
};

void save_checkpoint(const std::filesystem::path& path, const CorefModel& model,
                     const TrainConfig& config, const nn::OptimizerState& optimizer = {});
std::string encode_checkpoint(const CorefModel& model, const TrainConfig& config,
                              const nn::OptimizerState& optimizer = {});
Checkpoint decode_checkpoint(std::string_view bytes);
Checkpoint load_checkpoint(const std::filesystem::path& path);

// Rebuilds the model and copies the stored parameters into it.
std::unique_ptr<CorefModel> model_from_checkpoint(const Checkpoint& checkpoint);

}  // namespace coref
