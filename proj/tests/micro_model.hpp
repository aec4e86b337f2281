// Copyright 2026 The lfkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "lfkit/eval.hpp"
#include "lfkit/trainer.hpp"

namespace lfkit::test {

// Small architecture for fast unit tests and gradient checks.
inline ModelConfig micro_config(int k_max = 2, int planes = 4, bool smooth = false) {
  ModelConfig cfg;
  cfg.k_max = k_max;
  cfg.planes = planes;
  cfg.d_min = -1.5;
  cfg.d_max = 1.5;
  cfg.cost_widths = {4, 3};
  cfg.cost_kernel = 5;
  cfg.estimator_widths = {8, 6};
  cfg.estimator_kernel = 3;
  cfg.refine_pairs = 1;
  cfg.refine_channels = 4;
  if (smooth) cfg.hidden_activation = nn::Act::kSoftplus;
  return cfg;
}

// One-layer scene light field with known constant disparity.
inline LightField micro_scene_lf(AngularGrid grid, int size, double disparity,
                                 std::uint64_t seed) {
  SceneSpec spec = simple_scene_spec(grid, size, size, 1, disparity, disparity);
  Rng rng(seed);
  return make_synthetic_scene(spec, rng).light_field();
}

// Fixed corner-ish batch over the whole frame.
inline TrainingBatch micro_batch(const LightField& lf, const SamplingPattern& pattern) {
  TrainingBatch batch;
  batch.pattern = pattern;
  batch.targets = complement_pattern(lf.grid(), pattern);
  batch.gt = lf;
  for (const AngularCoord& p : pattern.coords) batch.inputs.push_back(lf.view(p));
  return batch;
}

}  // namespace lfkit::test
