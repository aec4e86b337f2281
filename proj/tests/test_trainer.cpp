// Copyright 2026 The lfkit Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <fstream>
#include <set>

#include "lfkit/trainer.hpp"
#include "micro_model.hpp"
#include "test_helpers.hpp"

using namespace lfkit;

TEST_SUITE_BEGIN("trainer");

TEST_CASE("fixed-pattern policy always returns the configured pattern") {
  LightField lf = test::micro_scene_lf({3, 3}, 16, 0.5, 91);
  TrainConfig cfg;
  cfg.patch = 8;
  cfg.policy = TrainConfig::Policy::kFixedPattern;
  cfg.fixed_pattern = SamplingPattern{{{1, 1}, {3, 3}}};
  Rng rng(92);
  for (int i = 0; i < 5; ++i) {
    TrainingBatch b = sample_training_patch(lf, cfg, rng);
    CHECK(b.pattern.coords == cfg.fixed_pattern.coords);
    CHECK(b.targets.size() == 7);
    CHECK(b.inputs.size() == 2);
    CHECK(b.gt.width() == 8);
  }
}

TEST_CASE("random policy draws K distinct in-grid coords") {
  LightField lf = test::micro_scene_lf({7, 7}, 16, 0.5, 93);
  TrainConfig cfg;
  cfg.patch = 8;
  cfg.policy = TrainConfig::Policy::kRandomK;
  cfg.k = 4;
  Rng rng(94);
  for (int i = 0; i < 10; ++i) {
    TrainingBatch b = sample_training_patch(lf, cfg, rng);
    REQUIRE(b.pattern.size() == 4);
    std::set<std::pair<int, int>> seen;
    for (const AngularCoord& c : b.pattern.coords) {
      CHECK(lf.grid().contains(c));
      CHECK(seen.insert({c.u, c.v}).second);
    }
  }
}

TEST_CASE("patch sampling is deterministic under a fixed seed") {
  LightField lf = test::micro_scene_lf({3, 3}, 24, 0.5, 95);
  TrainConfig cfg;
  cfg.patch = 8;
  cfg.policy = TrainConfig::Policy::kRandomK;
  cfg.k = 2;
  Rng r1(96), r2(96);
  for (int i = 0; i < 8; ++i) {
    TrainingBatch a = sample_training_patch(lf, cfg, r1);
    TrainingBatch b = sample_training_patch(lf, cfg, r2);
    CHECK(a.pattern.coords == b.pattern.coords);
    CHECK(a.gt.data() == b.gt.data());
  }
}

TEST_CASE("patch must fit inside the light field") {
  LightField lf = test::micro_scene_lf({3, 3}, 16, 0.5, 97);
  TrainConfig cfg;
  cfg.patch = 32;
  cfg.policy = TrainConfig::Policy::kRandomK;
  cfg.k = 2;
  Rng rng(98);
  CHECK_THROWS_AS(sample_training_patch(lf, cfg, rng), Error);
}

TEST_CASE("train_step returns a finite nonnegative loss on random init") {
  ModelConfig mcfg = test::micro_config();
  Rng rng(99);
  nn::ParamStore params = model::init_params(mcfg, rng);
  LightField lf = test::micro_scene_lf({3, 3}, 16, 0.6, 100);
  TrainingBatch batch = test::micro_batch(lf, SamplingPattern{{{1, 1}, {3, 3}}});
  TrainConfig cfg;
  const double loss = train_step(params, batch, mcfg, {}, cfg, 1e-4);
  CHECK(std::isfinite(loss));
  CHECK(loss >= 0.0);
}

TEST_CASE("identical seeds give bit-identical loss traces") {
  ModelConfig mcfg = test::micro_config();
  LightField lf = test::micro_scene_lf({3, 3}, 16, 0.6, 101);
  TrainConfig cfg;
  cfg.patch = 8;
  cfg.policy = TrainConfig::Policy::kRandomK;
  cfg.k = 2;
  cfg.max_iterations = 6;
  cfg.seed = 4242;
  TrainResult a = train({lf}, mcfg, cfg, {});
  TrainResult b = train({lf}, mcfg, cfg, {});
  REQUIRE(a.trace.size() == b.trace.size());
  for (std::size_t i = 0; i < a.trace.size(); ++i) {
    CHECK(a.trace[i].loss == b.trace[i].loss);
    CHECK(a.trace[i].lr == b.trace[i].lr);
  }
}

TEST_CASE("overfitting a fixed micro-batch halves the loss within 200 steps") {
  ModelConfig mcfg = test::micro_config();
  Rng rng(102);
  nn::ParamStore params = model::init_params(mcfg, rng);
  LightField lf = test::micro_scene_lf({3, 3}, 16, 0.7, 103);
  TrainingBatch batch = test::micro_batch(lf, SamplingPattern{{{1, 1}, {3, 3}}});
  TrainConfig cfg;
  const double initial = train_step(params, batch, mcfg, {}, cfg, 3e-3);
  double last = initial;
  for (int i = 0; i < 199; ++i) last = train_step(params, batch, mcfg, {}, cfg, 3e-3);
  CHECK(last < 0.5 * initial);
}

TEST_CASE("zero-iteration training returns the seeded initialization unchanged") {
  ModelConfig mcfg = test::micro_config();
  LightField lf = test::micro_scene_lf({3, 3}, 16, 0.5, 104);
  TrainConfig cfg;
  cfg.patch = 16;
  cfg.max_iterations = 0;
  cfg.policy = TrainConfig::Policy::kRandomK;
  cfg.k = 2;
  cfg.seed = 77;
  TrainResult result = train({lf}, mcfg, cfg, {});
  CHECK(result.trace.empty());

  Rng root(77);
  Rng init_rng = root.fork(0);
  nn::ParamStore expected = model::init_params(mcfg, init_rng);
  for (const auto& [name, e] : expected.entries())
    for (std::int64_t i = 0; i < e.value.numel(); ++i)
      CHECK(result.params.at(name).v[i] == e.value.v[i]);
}

TEST_CASE("learning rate never rises and changes only by exact halving") {
  ModelConfig mcfg = test::micro_config();
  LightField lf = test::micro_scene_lf({3, 3}, 16, 0.5, 105);
  TrainConfig cfg;
  cfg.policy = TrainConfig::Policy::kFixedPattern;
  cfg.fixed_pattern = SamplingPattern{{{1, 1}, {3, 3}}};
  cfg.patch = 16;
  cfg.max_iterations = 30;
  // aggressive plateau so halvings trigger inside the short run
  cfg.ma_window = 2;
  cfg.plateau_patience = 5;
  cfg.plateau_delta = 0.5;  // nearly impossible relative improvement
  TrainResult result = train({lf}, mcfg, cfg, {});
  REQUIRE(!result.trace.empty());
  int halvings = 0;
  for (std::size_t i = 1; i < result.trace.size(); ++i) {
    const double prev = result.trace[i - 1].lr;
    const double cur = result.trace[i].lr;
    CHECK(cur <= prev);
    if (cur != prev) {
      CHECK(cur == doctest::Approx(prev * 0.5).epsilon(1e-15));
      ++halvings;
    }
  }
  CHECK(halvings >= 2);
  // lr(t) = lr0 * 2^-h(t)
  const double ratio = result.trace.front().lr / result.trace.back().lr;
  CHECK(std::abs(ratio - std::exp2(std::round(std::log2(ratio)))) <= 1e-12);
}

TEST_CASE("training rejects an empty dataset") {
  ModelConfig mcfg = test::micro_config();
  TrainConfig cfg;
  CHECK_THROWS_AS(train({}, mcfg, cfg, {}), Error);
}

TEST_CASE("gradient accumulation runs and stays deterministic") {
  ModelConfig mcfg = test::micro_config();
  LightField lf = test::micro_scene_lf({3, 3}, 16, 0.5, 106);
  TrainConfig cfg;
  cfg.patch = 8;
  cfg.batch = 2;
  cfg.max_iterations = 3;
  cfg.seed = 5150;
  cfg.policy = TrainConfig::Policy::kRandomK;
  cfg.k = 2;
  TrainResult a = train({lf}, mcfg, cfg, {});
  TrainResult b = train({lf}, mcfg, cfg, {});
  REQUIRE(a.trace.size() == 3);
  for (std::size_t i = 0; i < a.trace.size(); ++i) {
    CHECK(std::isfinite(a.trace[i].loss));
    CHECK(a.trace[i].loss == b.trace[i].loss);
  }
}

TEST_CASE("multi-field datasets draw from every entry deterministically") {
  ModelConfig mcfg = test::micro_config();
  LightField lf1 = test::micro_scene_lf({3, 3}, 16, 0.4, 107);
  LightField lf2 = test::micro_scene_lf({3, 3}, 16, 0.8, 108);
  TrainConfig cfg;
  cfg.patch = 8;
  cfg.max_iterations = 4;
  cfg.seed = 99;
  cfg.policy = TrainConfig::Policy::kRandomK;
  cfg.k = 2;
  TrainResult a = train({lf1, lf2}, mcfg, cfg, {});
  TrainResult b = train({lf1, lf2}, mcfg, cfg, {});
  for (std::size_t i = 0; i < a.trace.size(); ++i) CHECK(a.trace[i].loss == b.trace[i].loss);
}

TEST_CASE("trace CSV is written with one line per iteration") {
  test::TempDir dir("trace");
  std::vector<TraceEntry> trace{{0, 0.5, 1e-4}, {1, 0.25, 1e-4}};
  const std::string path = dir.str() + "/loss.csv";
  write_trace_csv(path, trace);
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  CHECK(line == "iteration,loss,lr");
  int rows = 0;
  while (std::getline(in, line))
    if (!line.empty()) ++rows;
  CHECK(rows == 2);
}

TEST_SUITE_END();
