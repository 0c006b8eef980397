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

#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <memory>
#include <optional>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "coref/analysis.hpp"
#include "coref/config.hpp"
#include "coref/corpus.hpp"
#include "coref/error.hpp"
#include "coref/log.hpp"
#include "coref/metrics.hpp"
#include "coref/pipeline.hpp"
#include "coref/rng.hpp"
#include "coref/trainer.hpp"

#ifndef COREF_BUILD_ID
#define COREF_BUILD_ID "unknown"
#endif

namespace coref::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LookupError("cannot open " + path.string());
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

// Writes through a temporary sibling so readers never see a partial file.
void write_file(const fs::path& path, std::string_view content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw LookupError("cannot write " + path.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw FormatError("failed writing " + path.string());
  }
  fs::rename(tmp, path);
}

std::string hex_digest(std::string_view bytes) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(bytes)));
  return buf;
}

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

struct Globals {
  std::optional<std::uint64_t> seed;
  int jobs = 1;
  std::string config_path;
  std::vector<std::string> overrides;
  std::string log_level = "info";
};

struct EmbedFlags {
  std::string path;
  std::string provider;
  std::optional<int> dim;
  std::optional<std::uint64_t> seed;
};

// Records what a subcommand read and wrote; saved next to its main output.
class Manifest {
 public:
  explicit Manifest(std::string command) {
    doc_["command"] = std::move(command);
    doc_["build_id"] = COREF_BUILD_ID;
    doc_["started_at"] = utc_now();
    doc_["inputs"] = json::object();
  }
  void input(const std::string& role, const fs::path& path, std::string_view bytes) {
    doc_["inputs"][role] = {{"path", path.string()}, {"fnv1a64", hex_digest(bytes)}};
  }
  void config(const KeyValueConfig& kv) {
    json c = json::object();
    for (const auto& [k, v] : kv.entries()) c[k] = v;
    doc_["config"] = std::move(c);
  }
  void set(const std::string& key, json value) { doc_[key] = std::move(value); }
  void write(const fs::path& output) {
    doc_["finished_at"] = utc_now();
    write_file(output.string() + ".manifest.json", doc_.dump(2) + "\n");
  }

 private:
  json doc_;
};

// defaults < --config file < --set key=value < dedicated flags.
KeyValueConfig resolve_config(KeyValueConfig base, const Globals& globals, const EmbedFlags* embed) {
  if (!globals.config_path.empty()) base.merge(KeyValueConfig::load(globals.config_path));
  for (const std::string& kv : globals.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ArgumentError("--set expects key=value, got '" + kv + "'");
    base.merge(KeyValueConfig::parse(kv.substr(0, eq) + " = " + kv.substr(eq + 1)));
  }
  if (globals.seed) base.set("seed", std::to_string(*globals.seed));
  if (embed != nullptr) {
    if (!embed->path.empty()) {
      base.set("embed.path", embed->path);
      if (embed->provider.empty()) base.set("embed.provider", "file");
    }
    if (!embed->provider.empty()) base.set("embed.provider", embed->provider);
    if (embed->dim) base.set("embed.dim", std::to_string(*embed->dim));
    if (embed->seed) base.set("embed.seed", std::to_string(*embed->seed));
  }
  return base;
}

std::unique_ptr<EmbeddingProvider> make_provider(const EmbeddingConfig& c) {
  if (c.provider == "hash") return std::make_unique<HashEmbeddingProvider>(c.dim, c.seed);
  if (c.provider == "file") {
    if (c.path.empty()) throw ArgumentError("embed.provider = file needs --embeddings");
    return std::make_unique<FileEmbeddingProvider>(c.path);
  }
  throw ArgumentError("unknown embedding provider '" + c.provider + "'");
}

void add_embed_flags(CLI::App* cmd, EmbedFlags& flags) {
  cmd->add_option("--embeddings", flags.path, "Embedding container or jsonlines dump");
  cmd->add_option("--embed-provider", flags.provider, "file | hash")
      ->check(CLI::IsMember({"file", "hash"}));
  cmd->add_option("--embed-dim", flags.dim, "Hash provider dimension");
  cmd->add_option("--embed-seed", flags.seed, "Hash provider seed");
}

std::vector<fs::path> conll_files(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw LookupError("not a directory: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string name = entry.path().filename().string();
    const bool conll = name.size() >= 6 && (name.ends_with("_conll") || name.ends_with(".conll"));
    if (conll) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

// doc_key plus clusters from either a prediction dump or a document file.
std::vector<DocumentPrediction> read_cluster_lines(std::string_view text) {
  std::vector<DocumentPrediction> out;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw ParseError("line " + std::to_string(line_no) + ": " + e.what());
    }
    DocumentPrediction p;
    try {
      p.doc_key = j.at("doc_key").get<std::string>();
      for (const auto& cj : j.at("clusters")) {
        Cluster c;
        for (const auto& s : cj) c.push_back(Span{s.at(0).get<int>(), s.at(1).get<int>()});
        p.clusters.push_back(std::move(c));
      }
    } catch (const json::exception& e) {
      throw FormatError("line " + std::to_string(line_no) + ": " + e.what());
    }
    out.push_back(std::move(p));
  }
  return out;
}

int run_preprocess(const Globals&, const std::string& input, const std::string& output,
                   int max_seg_len) {
  if (max_seg_len <= 0) throw ArgumentError("--max-seg-len must be positive");
  Manifest manifest("preprocess");
  std::vector<Document> docs;
  std::set<std::string> keys;
  for (const fs::path& file : conll_files(input)) {
    const std::string text = read_file(file);
    manifest.input(file.filename().string(), file, text);
    for (Document& d : parse_conll(text)) {
      if (!keys.insert(d.doc_key).second) throw FormatError("duplicate doc_key " + d.doc_key);
      docs.push_back(std::move(d));
    }
  }
  int segments = 0;
  int overflow = 0;
  for (const Document& d : docs) {
    for (const Segment& s : segment_document(d, max_seg_len)) {
      ++segments;
      if (s.overflow) ++overflow;
    }
  }
  write_file(output, to_jsonlines(docs));
  manifest.set("max_seg_len", max_seg_len);
  manifest.set("documents", docs.size());
  manifest.write(output);
  log::info("preprocessed", {{"documents", docs.size()},
                             {"segments", segments},
                             {"overflow_segments", overflow},
                             {"output", output}});
  return kExitOk;
}

int run_train(const Globals& globals, const EmbedFlags& embed, const std::string& train_path,
              const std::string& dev_path, const std::string& out, std::optional<int> epochs,
              const std::string& hoi) {
  KeyValueConfig kv = resolve_config(to_key_values(TrainConfig{}), globals, &embed);
  if (epochs) kv.set("epochs", std::to_string(*epochs));
  if (!hoi.empty()) kv.set("hoi.method", hoi);
  const TrainConfig config = train_config_from(kv);

  Manifest manifest("train");
  manifest.config(to_key_values(config));
  manifest.set("seed", config.seed);
  const std::string train_text = read_file(train_path);
  manifest.input("train", train_path, train_text);
  const auto train_docs = from_jsonlines(train_text);
  std::vector<Document> dev_docs = train_docs;
  if (!dev_path.empty()) {
    const std::string dev_text = read_file(dev_path);
    manifest.input("dev", dev_path, dev_text);
    dev_docs = from_jsonlines(dev_text);
  }

  const auto provider = make_provider(config.embedding);
  const TrainResult result = Trainer(config, *provider).train(train_docs, dev_docs);
  if (out.empty()) throw ArgumentError("train needs --out");
  write_file(out, encode_checkpoint(*result.model, config, result.optimizer));

  json history = json::array();
  for (const auto& r : result.history) {
    history.push_back({{"epoch", r.epoch}, {"loss", r.mean_loss}, {"dev_avg_f1", r.dev_avg_f1}});
  }
  manifest.set("history", std::move(history));
  manifest.set("best_epoch", result.best_epoch);
  manifest.set("best_dev_avg_f1", result.best_dev_f1);
  manifest.write(out);
  log::info("trained", {{"best_epoch", result.best_epoch},
                        {"best_dev_avg_f1", result.best_dev_f1},
                        {"steps", result.steps},
                        {"checkpoint", out}});
  return kExitOk;
}

struct LoadedModel {
  TrainConfig config;
  std::unique_ptr<CorefModel> model;
  std::unique_ptr<EmbeddingProvider> provider;
};

LoadedModel load_model(const Globals& globals, const EmbedFlags& embed, const std::string& path,
                       Manifest& manifest) {
  const std::string bytes = read_file(path);
  manifest.input("model", path, bytes);
  Checkpoint ck = decode_checkpoint(bytes);
  KeyValueConfig kv = resolve_config(to_key_values(ck.config), globals, &embed);
  ck.config = train_config_from(kv);
  LoadedModel m;
  m.config = ck.config;
  m.model = model_from_checkpoint(ck);
  m.provider = make_provider(m.config.embedding);
  if (m.provider->dim() != m.model->token_dim()) {
    throw DimensionError("embedding dim " + std::to_string(m.provider->dim()) +
                         " does not match the model's " + std::to_string(m.model->token_dim()));
  }
  manifest.config(kv);
  return m;
}

int run_predict(const Globals& globals, const EmbedFlags& embed, const std::string& model_path,
                const std::string& input, const std::string& output, const std::string& hoi) {
  Manifest manifest("predict");
  LoadedModel m = load_model(globals, embed, model_path, manifest);
  const std::string text = read_file(input);
  manifest.input("input", input, text);
  const auto docs = from_jsonlines(text);
  std::optional<HoiMethod> method;
  if (!hoi.empty()) method = parse_hoi_method(hoi);
  const auto preds = predict_corpus(*m.model, docs, *m.provider, method, globals.jobs);
  write_file(output, predictions_to_jsonlines(preds));
  manifest.set("hoi", to_string(method.value_or(m.config.model.hoi.method)));
  manifest.write(output);
  log::info("predicted", {{"documents", preds.size()}, {"output", output}});
  return kExitOk;
}

int run_evaluate(const Globals&, const std::string& gold_path, const std::string& pred_path,
                 const std::string& report_path) {
  Manifest manifest("evaluate");
  const std::string gold_text = read_file(gold_path);
  const std::string pred_text = read_file(pred_path);
  manifest.input("gold", gold_path, gold_text);
  manifest.input("pred", pred_path, pred_text);
  const MetricsReport report =
      evaluate_predictions(from_jsonlines(gold_text), read_cluster_lines(pred_text));
  const std::string body = report.to_json().dump(2) + "\n";
  if (report_path.empty()) {
    std::cout << body;
  } else {
    write_file(report_path, body);
    manifest.write(report_path);
  }
  log::info("evaluated", {{"avg_f1", report.avg_f1}});
  return kExitOk;
}

int run_analyze(const Globals& globals, const EmbedFlags& embed, const std::string& before_path,
                const std::string& after_path, const std::string& gold_path,
                const std::string& out, const std::string& lexicon_path,
                std::optional<bool> include_nongold, const std::string& model_path) {
  Manifest manifest("analyze");
  const std::string gold_text = read_file(gold_path);
  manifest.input("gold", gold_path, gold_text);
  const auto gold = from_jsonlines(gold_text);

  KeyValueConfig kv = resolve_config(KeyValueConfig{}, globals, nullptr);
  LinkChangeOptions options;
  if (kv.has("analysis.include_nongold")) {
    const std::string& v = kv.entries().at("analysis.include_nongold");
    if (v != "true" && v != "false") throw ArgumentError("analysis.include_nongold: expected true|false");
    options.include_nongold = v == "true";
  }
  if (include_nongold) options.include_nongold = *include_nongold;

  PronounLexicon lexicon = PronounLexicon::english();
  if (!lexicon_path.empty()) {
    lexicon = PronounLexicon::load(lexicon_path);
    manifest.input("lexicon", lexicon_path, read_file(lexicon_path));
  }

  json result = json::object();
  result["include_nongold"] = options.include_nongold;
  if (!before_path.empty() || !after_path.empty()) {
    if (before_path.empty() || after_path.empty()) {
      throw ArgumentError("--before and --after go together");
    }
    const std::string before_text = read_file(before_path);
    const std::string after_text = read_file(after_path);
    manifest.input("before", before_path, before_text);
    manifest.input("after", after_path, after_text);
    const auto before = predictions_from_jsonlines(before_text);
    const auto after = predictions_from_jsonlines(after_text);
    result["link_change"] = link_change(before, after, gold, options).to_json();
    result["pronouns_before"] = pronoun_analysis(before, gold, lexicon).to_json();
    result["pronouns"] = pronoun_analysis(after, gold, lexicon).to_json();
  }
  if (!model_path.empty()) {
    LoadedModel m = load_model(globals, embed, model_path, manifest);
    result["hoi_off"] = hoi_off_eval(*m.model, gold, *m.provider, globals.jobs).to_json();
  }
  if (result.size() == 1) throw ArgumentError("analyze needs --before/--after or --model");

  const std::string body = result.dump(2) + "\n";
  if (out.empty()) {
    std::cout << body;
  } else {
    write_file(out, body);
    manifest.write(out);
  }
  return kExitOk;
}

log::Level parse_level(const std::string& s) {
  if (s == "debug") return log::Level::kDebug;
  if (s == "info") return log::Level::kInfo;
  if (s == "warning") return log::Level::kWarning;
  return log::Level::kError;
}

}  // namespace

int dispatch(int argc, const char* const* argv) {
  CLI::App app{"Span-ranking coreference resolution with higher-order inference", "coref"};
  app.require_subcommand(1);
  // Global options may also follow the subcommand.
  app.fallthrough();
  app.set_help_all_flag("--help-all");

  Globals globals;
  app.add_option("--seed", globals.seed, "Override the configured seed");
  app.add_option("--jobs", globals.jobs, "Documents processed in parallel")->check(CLI::PositiveNumber);
  app.add_option("--config", globals.config_path, "Key-value config file")->check(CLI::ExistingFile);
  app.add_option("--set", globals.overrides, "Override one config key (key=value)")
      ->expected(1)
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  app.add_option("--log-level", globals.log_level, "debug | info | warning | error")
      ->check(CLI::IsMember({"debug", "info", "warning", "error"}));

  std::string input, output, train_path, dev_path, model_path, gold_path, pred_path, report_path;
  std::string before_path, after_path, lexicon_path, hoi;
  int max_seg_len = ModelConfig{}.max_segment_len;
  std::optional<int> epochs;
  std::optional<bool> include_nongold;
  EmbedFlags embed;
  const std::vector<std::string> methods = {"none", "aa", "ee", "sc", "cm"};

  auto* pre = app.add_subcommand("preprocess", "Convert CoNLL-2012 files to jsonlines");
  pre->add_option("--input", input, "Directory of *_conll files")->required();
  pre->add_option("--output", output, "Output jsonlines")->required();
  pre->add_option("--max-seg-len", max_seg_len, "Segment length in tokens");

  auto* train = app.add_subcommand("train", "Train a model");
  train->add_option("--train", train_path, "Training jsonlines")->required();
  train->add_option("--dev", dev_path, "Dev jsonlines (defaults to the training set)");
  train->add_option("--out", output, "Checkpoint path")->required();
  train->add_option("--epochs", epochs, "Override epochs");
  train->add_option("--hoi", hoi, "Higher-order method")->check(CLI::IsMember(methods));
  add_embed_flags(train, embed);

  auto* predict = app.add_subcommand("predict", "Write a prediction dump");
  predict->add_option("--model", model_path, "Checkpoint")->required();
  predict->add_option("--input", input, "Documents jsonlines")->required();
  predict->add_option("--output", output, "Prediction dump")->required();
  predict->add_option("--hoi", hoi, "Override the higher-order method")->check(CLI::IsMember(methods));
  add_embed_flags(predict, embed);

  auto* evaluate = app.add_subcommand("evaluate", "Score predictions");
  evaluate->add_option("--gold", gold_path, "Gold jsonlines")->required();
  evaluate->add_option("--pred", pred_path, "Prediction dump or jsonlines")->required();
  evaluate->add_option("--report", report_path, "Report path (stdout when omitted)");

  auto* analyze = app.add_subcommand("analyze", "Link-change, pronoun and HOI-off analyses");
  analyze->add_option("--before", before_path, "Dump before refinement");
  analyze->add_option("--after", after_path, "Dump after refinement");
  analyze->add_option("--gold", gold_path, "Gold jsonlines")->required();
  analyze->add_option("--out", output, "Report path (stdout when omitted)");
  analyze->add_option("--lexicon", lexicon_path, "Pronoun lexicon JSON");
  analyze->add_option("--include-nongold", include_nongold, "Count mentions outside gold");
  analyze->add_option("--model", model_path, "Checkpoint for the HOI-off evaluation");
  add_embed_flags(analyze, embed);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  log::set_min_level(parse_level(globals.log_level));
  try {
    if (pre->parsed()) return run_preprocess(globals, input, output, max_seg_len);
    if (train->parsed()) return run_train(globals, embed, train_path, dev_path, output, epochs, hoi);
    if (predict->parsed()) return run_predict(globals, embed, model_path, input, output, hoi);
    if (evaluate->parsed()) return run_evaluate(globals, gold_path, pred_path, report_path);
    if (analyze->parsed()) {
      return run_analyze(globals, embed, before_path, after_path, gold_path, output, lexicon_path,
                         include_nongold, model_path);
    }
  } catch (const ArgumentError& e) {
    log::error(e.what());
    return kExitUsage;
  } catch (const Error& e) {
    log::error(e.what());
    return kExitData;
  } catch (const std::exception& e) {
    log::error(e.what());
    return kExitData;
  }
  return kExitUsage;
}

int dispatch(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  return dispatch(static_cast<int>(argv.size()), argv.data());
}

}  // namespace coref::cli
