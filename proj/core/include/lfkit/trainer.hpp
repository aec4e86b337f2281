// Copyright 2026 The lfkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "lfkit/loss.hpp"
#include "lfkit/model.hpp"
#include "lfkit/nn/grad_check.hpp"

namespace lfkit {

// Training protocol: random spatial patches, Adam, learning rate halved when
// the windowed moving-average loss plateaus.
struct TrainConfig {
  int patch = 64;
  int batch = 1;  // gradient accumulation per step
  double lr = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  // plateau rule: halve lr when the ma_window moving average fails to improve
  // by plateau_delta (relative) for plateau_patience iterations
  int ma_window = 100;
  double plateau_delta = 1e-3;
  int plateau_patience = 500;

  int max_iterations = 1000;
  std::uint64_t seed = 0;

  enum class Policy { kFixedPattern, kRandomK, kRandomKRange };
  Policy policy = Policy::kFixedPattern;
  SamplingPattern fixed_pattern;  // kFixedPattern
  int k = 4;                      // kRandomK
  int k_min = 2, k_max = 4;       // kRandomKRange

  void validate(const AngularGrid& grid, int lf_width, int lf_height) const;
};

struct TrainingBatch {
  std::vector<Image> inputs;  // single channel, patch-sized
  SamplingPattern pattern;
  TargetSet targets;
  LightField gt;  // patch-sized ground truth over the full grid, C=1
};

// Uniform random spatial crop applied to all views; pattern drawn per policy.
TrainingBatch sample_training_patch(const LightField& lf, const TrainConfig& cfg, Rng& rng);

// Builds the full differentiable pipeline (coarse + refine + total loss) on
// one batch: returns the loss and the gradient of every parameter. Pure in
// (params, batch).
nn::LossEval evaluate_batch(const nn::ParamStore& params, const TrainingBatch& batch,
                            const ModelConfig& model_cfg, const loss::LossWeights& weights,
                            bool normalize = true);

// Forward-only loss (params bound as constants; no gradient bookkeeping).
double batch_loss_value(const nn::ParamStore& params, const TrainingBatch& batch,
                        const ModelConfig& model_cfg, const loss::LossWeights& weights,
                        bool normalize = true);

// Forward (coarse + refine) -> total loss -> backward -> Adam. Returns the
// pre-update normalized loss. Throws on non-finite loss.
double train_step(nn::ParamStore& params, const TrainingBatch& batch, const ModelConfig& model_cfg,
                  const loss::LossWeights& weights, const TrainConfig& cfg, double lr);

struct TraceEntry {
  int iteration = 0;
  double loss = 0.0;
  double lr = 0.0;
};

struct TrainResult {
  nn::ParamStore params;
  std::vector<TraceEntry> trace;
};

// Full loop over iterations; per-iteration loss log and finite-parameter
// asserts. Dataset views must share grid and spatial extent. The optional
// callback runs after every iteration; returning true stops the loop early.
using TrainProgress = std::function<bool(int iteration, const nn::ParamStore& params)>;
TrainResult train(const std::vector<LightField>& dataset, const ModelConfig& model_cfg,
                  const TrainConfig& cfg, const loss::LossWeights& weights,
                  const TrainProgress& should_stop = {});

// "iteration,loss,lr" per line.
void write_trace_csv(const std::string& path, const std::vector<TraceEntry>& trace);

}  // namespace lfkit
