// Copyright 2026 The lfkit Authors
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include "lfkit/eval.hpp"
#include "lfkit/geometry.hpp"
#include "lfkit/nn/tape.hpp"
#include "lfkit/pattern.hpp"
#include "lfkit/rng.hpp"

using namespace lfkit;

namespace {

Image random_image(int w, int h, Rng& rng) {
  Image img(w, h, 1);
  for (float& v : img.data) v = static_cast<float>(rng.uniform());
  return img;
}

nn::Tensor random_tensor(std::vector<int> shape, Rng& rng) {
  nn::Tensor t(std::move(shape));
  for (auto& v : t.v) v = static_cast<real>(rng.uniform(-1.0, 1.0));
  return t;
}

void BM_BackwardWarp(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Rng rng(1);
  Image src = random_image(n, n, rng);
  DisparityMap disp{{2, 2}, random_image(n, n, rng)};
  for (auto _ : state) {
    Image out = backward_warp(src, {1, 1}, {2, 2}, disp);
    benchmark::DoNotOptimize(out.data.data());
  }
  state.SetItemsProcessed(state.iterations() * n * n);
}
BENCHMARK(BM_BackwardWarp)->Arg(64)->Arg(256);

void BM_BuildPsv(benchmark::State& state) {
  Rng rng(2);
  std::vector<Image> views;
  SamplingPattern pattern{{{1, 1}, {1, 5}, {5, 1}, {5, 5}}};
  for (int k = 0; k < 4; ++k) views.push_back(random_image(64, 64, rng));
  const std::vector<double> planes = uniform_planes(static_cast<int>(state.range(0)), -2.0, 2.0);
  for (auto _ : state) {
    PlaneSweepVolume psv = build_psv(views, pattern, {3, 3}, planes);
    benchmark::DoNotOptimize(psv.slabs[0][0].data.data());
  }
}
BENCHMARK(BM_BuildPsv)->Arg(8)->Arg(32);

void BM_Conv2dForward(benchmark::State& state) {
  Rng rng(3);
  nn::Tensor x = random_tensor({static_cast<int>(state.range(0)), 8, 64, 64}, rng);
  nn::Tensor w = random_tensor({8, 8, 3, 3}, rng);
  nn::Tensor b = random_tensor({8}, rng);
  for (auto _ : state) {
    nn::Tape tape;
    nn::Tape::NodeId y = tape.conv2d(tape.constant(x), tape.constant(w), tape.constant(b));
    benchmark::DoNotOptimize(tape.value(y).data());
  }
  const double macs = static_cast<double>(state.range(0)) * 8 * 8 * 9 * 64 * 64;
  state.counters["MAC/s"] =
      benchmark::Counter(macs * state.iterations(), benchmark::Counter::kIsRate);
}
BENCHMARK(BM_Conv2dForward)->Arg(1)->Arg(25);

void BM_AngularConv(benchmark::State& state) {
  // pseudo-4D refinement's angular step: tiny spatial extent, huge batch
  Rng rng(4);
  nn::Tensor x = random_tensor({4096, 8, 5, 5}, rng);
  nn::Tensor w = random_tensor({8, 8, 3, 3}, rng);
  nn::Tensor b = random_tensor({8}, rng);
  for (auto _ : state) {
    nn::Tape tape;
    nn::Tape::NodeId y = tape.conv2d(tape.constant(x), tape.constant(w), tape.constant(b));
    benchmark::DoNotOptimize(tape.value(y).data());
  }
}
BENCHMARK(BM_AngularConv);

void BM_Ssim(benchmark::State& state) {
  Rng rng(5);
  Image a = random_image(64, 64, rng);
  Image b = random_image(64, 64, rng);
  for (auto _ : state) benchmark::DoNotOptimize(ssim(a, b));
}
BENCHMARK(BM_Ssim);

void BM_OptimizePattern(benchmark::State& state) {
  for (auto _ : state) {
    SamplingPattern p = pattern::optimize_pattern({7, 7}, 4, 5, 1);
    benchmark::DoNotOptimize(p.coords.data());
  }
}
BENCHMARK(BM_OptimizePattern);

void BM_SceneRender(benchmark::State& state) {
  SceneSpec spec = simple_scene_spec({5, 5}, 64, 64, 2, 0.0, 1.5);
  for (auto _ : state) {
    Rng rng(6);
    SyntheticScene scene = make_synthetic_scene(spec, rng);
    benchmark::DoNotOptimize(scene.light_field().data().data());
  }
}
BENCHMARK(BM_SceneRender);

}  // namespace

BENCHMARK_MAIN();
