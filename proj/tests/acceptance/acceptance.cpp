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

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero when any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <string>

#include "coref/analysis.hpp"
#include "coref/embedding.hpp"
#include "coref/error.hpp"
#include "coref/log.hpp"
#include "coref/metrics.hpp"
#include "coref/nn/gradcheck.hpp"
#include "coref/pipeline.hpp"
#include "coref/trainer.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace coref;
using namespace coref::testing;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(const char* name, const std::function<Outcome()>& check) {
  const auto t0 = Clock::now();
  Outcome o;
  try {
    o = check();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  if (!o.pass) ++failures;
  std::printf("%s %s (%.1fs) %s\n", o.pass ? "PASS" : "FAIL", name, secs, o.detail.c_str());
  std::fflush(stdout);
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

constexpr HoiMethod kMethods[] = {HoiMethod::kNone, HoiMethod::kAttendedAntecedent,
                                  HoiMethod::kEntityEqualization, HoiMethod::kSpanClustering,
                                  HoiMethod::kClusterMerging};

Outcome metric_oracle() {
  const auto t0 = Clock::now();
  Rng rng(20260101);
  double worst = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const int n = static_cast<int>(rng.below(9));
    const Clusters gold = random_clusters(rng, n, 6);
    const Clusters pred = random_clusters(rng, n, 6);
    worst = std::max({worst, max_abs_difference(muc(gold, pred), muc_oracle(gold, pred)),
                      max_abs_difference(b_cubed(gold, pred), b3_oracle(gold, pred)),
                      max_abs_difference(ceaf_phi4(gold, pred), ceaf_oracle(gold, pred))});
  }
  const double secs = seconds_since(t0);
  return {worst <= 1e-9 && secs < 30.0, fmt("max abs error %.3g over 1000 instances, %.2fs", worst, secs)};
}

Outcome ee_normalization() {
  Rng rng(7);
  double worst = 0.0;
  for (int t = 0; t < 500; ++t) {
    const AntecedentFrame frame = random_frame(rng, 1 + static_cast<int>(rng.below(20)), 50);
    nn::Graph g(false);
    const nn::Matrix q = entity_membership(g.constant(random_distribution(rng, frame)), frame).value();
    for (int x = 0; x < frame.size(); ++x) worst = std::max(worst, std::abs(q.row(x).sum() - 1.0));
  }
  return {worst <= 1e-6, fmt("max |row sum - 1| %.3g over 500 matrices", worst)};
}

Outcome gradient_checks() {
  const auto t0 = Clock::now();
  const HashEmbeddingProvider emb(16, 5);
  double worst = 0.0;
  std::string detail;
  for (const HoiMethod m : kMethods) {
    double method_worst = 0.0;
    for (int inst = 0; inst < 3; ++inst) {
      Rng rng(100 + static_cast<std::uint64_t>(inst));
      // 12 tokens keep ceil(0.4 * 12) = 5 spans.
      Document doc = plain_document({4, 4, 4}, "bc/grad_" + std::to_string(inst));
      doc.clusters = canonical_clusters(random_clusters(rng, 12, 3));
      ModelConfig c;
      c.ffnn_size = 64;
      c.hoi.method = m;
      CorefModel model(c, 16);
      model.initialize(static_cast<std::uint64_t>(inst) + 1);
      const TokenEmbeddings vectors = emb.embed(doc);
      nn::GradCheckOptions opts;
      opts.max_entries_per_param = 10;
      opts.seed = static_cast<std::uint64_t>(inst);
      const auto r = nn::check_gradients(model.params(), [&](nn::Graph& g) {
        const ForwardResult f = model.forward(g, doc, vectors);
        if (f.frame.size() != 5) throw Error("expected 5 kept spans");
        return marginal_loss(f.final_scores, f.frame, gold_cluster_ids(f.frame.spans, doc.clusters));
      }, opts);
      method_worst = std::max(method_worst, r.max_relative_error);
    }
    worst = std::max(worst, method_worst);
    detail += to_string(m) + "=" + fmt("%.2g ", method_worst);
  }
  const double secs = seconds_since(t0);
  return {worst <= 1e-3 && secs < 60.0, detail + fmt("in %.1fs", secs)};
}

Outcome noop_equivalence() {
  const HashEmbeddingProvider emb(16, 1);
  Rng rng(33);
  std::vector<Document> docs;
  for (int i = 0; i < 100; ++i) docs.push_back(random_document(rng, i, 5, 12, 5));
  int mismatches = 0;
  for (const HoiMethod m : {HoiMethod::kAttendedAntecedent, HoiMethod::kEntityEqualization,
                            HoiMethod::kSpanClustering, HoiMethod::kClusterMerging}) {
    ModelConfig c;
    c.ffnn_size = 64;
    c.hoi.method = m;
    CorefModel model(c, 16);
    model.initialize(3);
    if (m == HoiMethod::kClusterMerging) {
      model.cluster_scorer().ffnn().zero_output();
    } else {
      model.gate().force(true);
    }
    for (const auto& doc : docs) {
      nn::Graph g(false);
      const ForwardResult r = model.forward(g, doc, emb.embed(doc));
      const bool same = r.antecedents == r.antecedents_pre_hoi &&
                        r.final_scores.value() == r.base_scores.value() &&
                        model.predict(doc, emb.embed(doc)) == model.predict(doc, emb.embed(doc), HoiMethod::kNone);
      mismatches += same ? 0 : 1;
    }
  }
  return {mismatches == 0, fmt("%.0f mismatching documents of 400", mismatches)};
}

Outcome hoi_off_toggle() {
  const std::vector<Document> docs = toy_corpus();
  const HashEmbeddingProvider emb(16, 0);
  std::string detail;
  bool ok = true;
  for (const HoiMethod m : kMethods) {
    // A short run so that both passes make links.
    TrainConfig c;
    c.epochs = 30;
    c.lr_task = 1e-3;
    c.model = small_model_config(m);
    c.model.ffnn_size = 64;
    c.model.max_span_width = 30;
    const TrainResult trained = Trainer(c, emb).train(docs, docs);
    const HoiOffReport r = hoi_off_eval(*trained.model, docs, emb);
    if (m == HoiMethod::kNone) ok = ok && r.drop == 0.0;
    ok = ok && std::isfinite(r.drop);
    detail += to_string(m) + fmt("=%+.4f (%.3f vs %.3f) ", r.drop, r.with_hoi.avg_f1, r.without_hoi.avg_f1);
  }
  return {ok, "drops " + detail};
}

Outcome link_change_accounting() {
  Rng rng(2024);
  int bad = 0;
  for (int t = 0; t < 200; ++t) {
    const DecisionPair d = random_decisions(rng, [](Rng& r, int n) { return random_clusters(r, n, 3); });
    const LinkChangeReport r = link_change(d.spans, d.before, d.after, d.gold);
    const LinkChangeReport same = link_change(d.spans, d.before, d.before, d.gold);
    const bool ok = r.total() == eligible_mentions(d) && r == link_change_oracle(d, true) &&
                    same.w2c == 0 && same.c2w == 0;
    bad += ok ? 0 : 1;
  }
  return {bad == 0, fmt("%.0f of 200 pairs violate the accounting", bad)};
}

Outcome toy_overfit() {
  const std::vector<Document> docs = toy_corpus();
  const HashEmbeddingProvider emb(64, 0);
  TrainConfig c;
  c.epochs = 200;
  c.stop_at_f1 = 0.95;
  const auto t0 = Clock::now();
  const TrainResult r = Trainer(c, emb).train(docs, docs);
  const double secs = seconds_since(t0);
  std::string detail = fmt("train Avg-F1 %.4f at epoch %.0f, %.0fs", r.best_dev_f1, r.best_epoch, secs);

  bool all_methods = true;
  for (const HoiMethod m : kMethods) {
    TrainConfig mc;
    mc.epochs = 5;
    mc.model.hoi.method = m;
    try {
      const TrainResult mr = Trainer(mc, emb).train(docs, docs);
      detail += "; " + to_string(m) + fmt(" %.3f", mr.best_dev_f1);
    } catch (const NumericError& e) {
      all_methods = false;
      detail += "; " + to_string(m) + " numeric error: " + e.what();
    }
  }
  return {r.best_dev_f1 >= 0.95 && secs < 600.0 && all_methods, detail};
}

Outcome determinism() {
  const std::vector<Document> docs = toy_corpus();
  const HashEmbeddingProvider emb(16, 0);
  const auto dir = std::filesystem::temp_directory_path();
  bool same = true;
  for (const HoiMethod m : kMethods) {
    TrainConfig c;
    c.epochs = 2;
    c.model = small_model_config(m);
    c.model.dropout = 0.3;
    std::string ckpt[2], dump[2];
    for (int run = 0; run < 2; ++run) {
      const TrainResult r = Trainer(c, emb).train(docs, docs);
      const auto path = dir / ("coref_accept_" + std::to_string(run) + ".ckpt");
      save_checkpoint(path, *r.model, c, r.optimizer);
      ckpt[run] = slurp(path.string());
      std::filesystem::remove(path);
      const auto model = model_from_checkpoint(decode_checkpoint(ckpt[run]));
      dump[run] = predictions_to_jsonlines(predict_corpus(*model, docs, emb, std::nullopt, 2));
    }
    same = same && ckpt[0] == ckpt[1] && dump[0] == dump[1] && !ckpt[0].empty();
  }
  return {same, same ? "checkpoints and dumps identical for all five methods" : "outputs differ"};
}

Outcome conll_round_trip() {
  Rng rng(500);
  int bad = 0;
  for (int i = 0; i < 500; ++i) {
    const Document doc = random_document(rng, i);
    const auto parsed = parse_conll(emit_conll({doc}));
    const auto back = from_jsonlines(to_jsonlines(parsed));
    const auto again = parse_conll(emit_conll(back));
    const bool ok = back.size() == 1 && again.size() == 1 && back[0].clusters == doc.clusters &&
                    again[0].clusters == doc.clusters && back[0].sentences == doc.sentences;
    bad += ok ? 0 : 1;
  }
  return {bad == 0, fmt("%.0f of 500 documents changed", bad)};
}

}  // namespace

int main() {
  log::set_min_level(log::Level::kError);
  report("metric_oracle_equivalence", metric_oracle);
  report("ee_normalization", ee_normalization);
  report("gradient_checks", gradient_checks);
  report("hoi_noop_equivalence", noop_equivalence);
  report("hoi_off_toggle", hoi_off_toggle);
  report("link_change_accounting", link_change_accounting);
  report("toy_overfit", toy_overfit);
  report("determinism", determinism);
  report("conll_round_trip", conll_round_trip);
  std::printf("%d failed\n", failures);
  return failures == 0 ? 0 : 1;
}
