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

#include "doctest.h"

#include "coref/config.hpp"
#include "coref/error.hpp"

using namespace coref;

TEST_SUITE("config") {
  TEST_CASE("defaults") {
    const TrainConfig c;
    CHECK(c.epochs == 24);
    CHECK(c.lr_task == 3e-4);
    CHECK(c.lr_encoder == 1e-5);
    CHECK(c.weight_decay_encoder == 1e-2);
    CHECK(c.model.dropout == 0.3);
    CHECK(c.model.max_antecedents == 50);
    CHECK(c.model.max_span_width == 30);
    CHECK(c.model.top_span_ratio == 0.4);
    CHECK(c.model.max_segment_len == 384);
    CHECK(c.model.hoi.ee_max_spans == 300);
    CHECK(c.model.hoi.cm_order == CmOrder::kSequential);
    CHECK(c.model.hoi.cm_reduce == CmReduce::kMax);
    CHECK(c.embedding.dim == 64);
  }

  TEST_CASE("parsing ignores comments and blank lines") {
    const auto kv = KeyValueConfig::parse("# header\n\nepochs = 3  # trailing\nhoi.method=cm\n");
    CHECK(kv.entries().size() == 2);
    CHECK(kv.entries().at("epochs") == "3");
    const TrainConfig c = train_config_from(kv);
    CHECK(c.epochs == 3);
    CHECK(c.model.hoi.method == HoiMethod::kClusterMerging);
    CHECK_THROWS_AS(KeyValueConfig::parse("no equals sign"), ArgumentError);
  }

  TEST_CASE("round trip through key-value text") {
    TrainConfig c;
    c.epochs = 7;
    c.lr_task = 1.25e-4;
    c.seed = 12345678901ULL;
    c.linear_decay = false;
    c.model.hoi.method = HoiMethod::kEntityEqualization;
    c.model.hoi.cm_order = CmOrder::kEasyFirst;
    c.model.gate_init = "keep";
    c.model.top_span_ratio = 0.1 + 0.2;
    c.embedding.provider = "file";
    c.embedding.path = "/tmp/x.bin";
    const TrainConfig back = train_config_from(KeyValueConfig::parse(to_key_values(c).dump()));
    CHECK(back.epochs == 7);
    CHECK(back.lr_task == c.lr_task);
    CHECK(back.seed == c.seed);
    CHECK(!back.linear_decay);
    CHECK(back.model.hoi.method == HoiMethod::kEntityEqualization);
    CHECK(back.model.hoi.cm_order == CmOrder::kEasyFirst);
    CHECK(back.model.gate_init == "keep");
    CHECK(back.model.top_span_ratio == c.model.top_span_ratio);
    CHECK(back.embedding.provider == "file");
    CHECK(back.embedding.path == "/tmp/x.bin");
    CHECK(to_key_values(back).dump() == to_key_values(c).dump());
  }

  TEST_CASE("bad keys and values are rejected") {
    KeyValueConfig kv;
    kv.set("epoch", "3");
    CHECK_THROWS_AS(train_config_from(kv), ArgumentError);
    kv = KeyValueConfig();
    kv.set("epochs", "three");
    CHECK_THROWS_AS(train_config_from(kv), ArgumentError);
    kv = KeyValueConfig();
    kv.set("hoi.method", "xx");
    CHECK_THROWS_AS(train_config_from(kv), ArgumentError);
    kv = KeyValueConfig();
    kv.set("lr.decay", "cosine");
    CHECK_THROWS_AS(train_config_from(kv), ArgumentError);
  }

  TEST_CASE("merge overrides entries") {
    auto a = KeyValueConfig::parse("epochs = 1\nseed = 2");
    a.merge(KeyValueConfig::parse("seed = 5"));
    CHECK(a.entries().at("seed") == "5");
    CHECK(a.entries().at("epochs") == "1");
  }
}
