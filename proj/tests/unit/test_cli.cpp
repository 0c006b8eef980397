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

#include <chrono>
#include <filesystem>
#include <fstream>

#include "doctest.h"

#include "cli.hpp"
#include "coref/log.hpp"
#include "coref/pipeline.hpp"
#include "support.hpp"

using namespace coref;
using namespace coref::testing;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("coref_cli_" + std::to_string(std::chrono::steady_clock::now().time_since_epoch().count()) +
                                        "_" + std::to_string(counter()++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
  static int& counter() {
    static int n = 0;
    return n;
  }
};

void write(const std::string& path, const std::string& text) {
  std::ofstream(path, std::ios::binary) << text;
}

int run(std::vector<std::string> args) {
  args.insert(args.begin(), "coref");
  args.insert(args.begin() + 1, {"--log-level", "error"});
  return cli::dispatch(args);
}

const std::vector<std::string> kSmall = {
    "--set", "model.ffnn_size=12", "--set", "model.ffnn_depth=1", "--set", "model.feature_dim=4",
    "--set", "model.max_span_width=4", "--set", "dropout=0.1"};

std::vector<std::string> with_small(std::vector<std::string> args) {
  args.insert(args.end(), kSmall.begin(), kSmall.end());
  return args;
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("evaluating gold against itself scores one") {
    TempDir dir;
    const std::string report = dir / "report.json";
    CHECK(run({"evaluate", "--gold", data_path("toy.jsonlines"), "--pred", data_path("toy.jsonlines"),
               "--report", report}) == cli::kExitOk);
    const auto j = nlohmann::json::parse(slurp(report));
    for (const char* m : {"muc", "b_cubed", "ceaf_phi4"}) CHECK(j[m]["f1"].get<double>() == 1.0);
    CHECK(j["avg_f1"].get<double>() == 1.0);
    const auto manifest = nlohmann::json::parse(slurp(report + ".manifest.json"));
    CHECK(manifest["command"] == "evaluate");
    CHECK(manifest["inputs"].size() == 2);
  }

  TEST_CASE("usage and data errors map to exit codes") {
    CHECK(run({"evaluate", "--bogus"}) == cli::kExitUsage);
    CHECK(run({}) == cli::kExitUsage);
    CHECK(run({"train", "--train", data_path("toy.jsonlines"), "--out", "/dev/null", "--set",
               "no_such_key=1"}) == cli::kExitUsage);
    TempDir dir;
    write(dir / "bad.jsonlines", "{\"doc_key\": \"nw/x_0\"}\n");
    CHECK(run({"evaluate", "--gold", dir / "bad.jsonlines", "--pred", dir / "bad.jsonlines"}) ==
          cli::kExitData);
  }

  TEST_CASE("preprocess converts column files") {
    TempDir dir;
    fs::create_directories(dir.path / "in" / "nested");
    Rng rng(3);
    std::vector<Document> docs;
    for (int i = 0; i < 3; ++i) {
      docs.push_back(random_document(rng, i));
    }
    write((dir.path / "in" / "a_conll").string(), emit_conll({docs[0], docs[1]}));
    write((dir.path / "in" / "nested" / "b.conll").string(), emit_conll({docs[2]}));
    const std::string out = dir / "out.jsonlines";
    REQUIRE(run({"preprocess", "--input", dir / "in", "--output", out}) == cli::kExitOk);
    const auto back = from_jsonlines(slurp(out));
    CHECK(back.size() == 3);
    CHECK(fs::exists(out + ".manifest.json"));

    write((dir.path / "in" / "c_conll").string(), emit_conll({docs[0]}));
    CHECK(run({"preprocess", "--input", dir / "in", "--output", dir / "dup.jsonlines"}) == cli::kExitData);
  }

  TEST_CASE("train, predict, evaluate and analyze") {
    TempDir dir;
    const std::string data = data_path("toy.jsonlines");
    const std::string ckpt = dir / "model.ckpt";
    REQUIRE(run(with_small({"train", "--train", data, "--out", ckpt, "--epochs", "2", "--hoi", "cm",
                            "--embed-dim", "8"})) == cli::kExitOk);
    CHECK(fs::exists(ckpt + ".manifest.json"));
    const std::string dump = dir / "pred.jsonlines";
    REQUIRE(run({"predict", "--model", ckpt, "--input", data, "--output", dump, "--jobs", "2"}) ==
            cli::kExitOk);
    const auto preds = predictions_from_jsonlines(slurp(dump));
    CHECK(preds.size() == 5);
    const std::string report = dir / "report.json";
    REQUIRE(run({"evaluate", "--gold", data, "--pred", dump, "--report", report}) == cli::kExitOk);
    const double f1 = nlohmann::json::parse(slurp(report))["avg_f1"].get<double>();
    CHECK(f1 >= 0.0);
    CHECK(f1 <= 1.0);

    const std::string none_dump = dir / "none.jsonlines";
    REQUIRE(run({"predict", "--model", ckpt, "--input", data, "--output", none_dump, "--hoi", "none"}) ==
            cli::kExitOk);
    const std::string analysis = dir / "analysis.json";
    REQUIRE(run({"analyze", "--before", none_dump, "--after", dump, "--gold", data, "--model", ckpt,
                 "--out", analysis}) == cli::kExitOk);
    const auto j = nlohmann::json::parse(slurp(analysis));
    CHECK(j.contains("link_change"));
    CHECK(j.contains("pronouns"));
    CHECK(j["hoi_off"]["method"] == "cm");
    CHECK(j["include_nongold"] == true);
    REQUIRE(run({"--set", "analysis.include_nongold=false", "analyze", "--before", none_dump, "--after",
                 dump, "--gold", data, "--out", analysis}) == cli::kExitOk);
    CHECK(nlohmann::json::parse(slurp(analysis))["include_nongold"] == false);

    CHECK(run({"predict", "--model", ckpt, "--input", data, "--output", dir / "x", "--embed-dim", "16"}) ==
          cli::kExitData);
  }

  TEST_CASE("refinement with a saturated gate leaves dumps unchanged") {
    TempDir dir;
    const std::string data = data_path("toy.jsonlines");
    const std::string ckpt = dir / "keep.ckpt";
    REQUIRE(run(with_small({"train", "--train", data, "--out", ckpt, "--epochs", "0", "--set",
                            "gate.init=keep", "--embed-dim", "8"})) == cli::kExitOk);
    REQUIRE(run({"predict", "--model", ckpt, "--input", data, "--output", dir / "none", "--hoi", "none"}) ==
            cli::kExitOk);
    REQUIRE(run({"predict", "--model", ckpt, "--input", data, "--output", dir / "aa", "--hoi", "aa"}) ==
            cli::kExitOk);
    const auto none = predictions_from_jsonlines(slurp(dir / "none"));
    const auto aa = predictions_from_jsonlines(slurp(dir / "aa"));
    REQUIRE(none.size() == aa.size());
    for (std::size_t i = 0; i < none.size(); ++i) CHECK(none[i].clusters == aa[i].clusters);
  }

  TEST_CASE("identical runs write identical files") {
    TempDir dir;
    const std::string data = data_path("toy.jsonlines");
    for (const char* tag : {"a", "b"}) {
      REQUIRE(run(with_small({"--seed", "7", "train", "--train", data, "--out", dir / (std::string(tag) + ".ckpt"),
                              "--epochs", "1", "--embed-dim", "8"})) == cli::kExitOk);
      REQUIRE(run({"predict", "--model", dir / (std::string(tag) + ".ckpt"), "--input", data, "--output",
                   dir / (std::string(tag) + ".dump")}) == cli::kExitOk);
    }
    CHECK(slurp(dir / "a.ckpt") == slurp(dir / "b.ckpt"));
    CHECK(slurp(dir / "a.dump") == slurp(dir / "b.dump"));
  }
}
