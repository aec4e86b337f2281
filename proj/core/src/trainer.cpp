// Copyright 2026 The lfkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "lfkit/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <limits>

namespace lfkit {

void TrainConfig::validate(const AngularGrid& grid, int lf_width, int lf_height) const {
  if (patch < 1 || patch > std::min(lf_width, lf_height))
    throw Error("patch size must fit inside the light field");
  if (lr <= 0.0) throw Error("learning rate must be positive");
  if (plateau_patience < 1) throw Error("plateau patience must be at least 1");
  if (batch < 1) throw Error("batch must be at least 1");
  if (policy == Policy::kFixedPattern) {
    fixed_pattern.validate(grid);
    if (fixed_pattern.size() >= grid.cells())
      throw Error("fixed pattern leaves no novel views");
  } else if (policy == Policy::kRandomK) {
    if (k < 1 || k >= grid.cells()) throw Error("k out of range");
  } else {
    if (k_min < 1 || k_max < k_min || k_max >= grid.cells()) throw Error("bad k range");
  }
}

TrainingBatch sample_training_patch(const LightField& lf, const TrainConfig& cfg, Rng& rng) {
  if (lf.channels() != 1) throw Error("training expects single-channel light fields");
  cfg.validate(lf.grid(), lf.width(), lf.height());
  const AngularGrid& grid = lf.grid();

  const int max_x = lf.width() - cfg.patch;
  const int max_y = lf.height() - cfg.patch;
  const int x0 = max_x > 0 ? static_cast<int>(rng.uniform_int(max_x + 1)) : 0;
  const int y0 = max_y > 0 ? static_cast<int>(rng.uniform_int(max_y + 1)) : 0;

  TrainingBatch batch;
  switch (cfg.policy) {
    case TrainConfig::Policy::kFixedPattern:
      batch.pattern = cfg.fixed_pattern;
      break;
    case TrainConfig::Policy::kRandomK:
    case TrainConfig::Policy::kRandomKRange: {
      int k = cfg.k;
      if (cfg.policy == TrainConfig::Policy::kRandomKRange)
        k = cfg.k_min + static_cast<int>(rng.uniform_int(cfg.k_max - cfg.k_min + 1));
      // distinct cells via partial Fisher-Yates over cell indices
      std::vector<int> cells(static_cast<std::size_t>(grid.cells()));
      for (int i = 0; i < grid.cells(); ++i) cells[static_cast<std::size_t>(i)] = i;
      for (int i = 0; i < k; ++i) {
        const int j = i + static_cast<int>(rng.uniform_int(grid.cells() - i));
        std::swap(cells[static_cast<std::size_t>(i)], cells[static_cast<std::size_t>(j)]);
        batch.pattern.coords.push_back(grid.coord(cells[static_cast<std::size_t>(i)]));
      }
      break;
    }
  }
  batch.targets = complement_pattern(grid, batch.pattern);

  batch.gt = LightField(grid, cfg.patch, cfg.patch, 1);
  for (int u = 1; u <= grid.rows; ++u)
    for (int v = 1; v <= grid.cols; ++v) {
      Image patch(cfg.patch, cfg.patch, 1);
      for (int y = 0; y < cfg.patch; ++y)
        for (int x = 0; x < cfg.patch; ++x)
          patch.at(x, y) = lf.at({u, v}, x0 + x, y0 + y);
      batch.gt.set_view({u, v}, patch);
    }
  for (const AngularCoord& p : batch.pattern.coords) batch.inputs.push_back(batch.gt.view(p));
  return batch;
}

namespace {

struct BuiltLoss {
  model::BoundParams bound;
  loss::TotalLossNodes total;
};

BuiltLoss build_loss_graph(nn::Tape& tape, const nn::ParamStore& params,
                           const TrainingBatch& batch, const ModelConfig& model_cfg,
                           const loss::LossWeights& weights, bool normalize, bool trainable) {
  model::BoundParams bound = model::bind_params(tape, params, trainable);
  model::CoarseNodes coarse = model::coarse_synthesis_nodes(tape, batch.inputs, batch.pattern,
                                                            batch.targets, model_cfg, bound);

  // assemble the intermediate stack: synthesized views are graph nodes,
  // pattern views constants
  const AngularGrid& grid = batch.gt.grid();
  std::vector<nn::Tape::NodeId> slots(static_cast<std::size_t>(grid.cells()), -1);
  std::vector<int> use_node(static_cast<std::size_t>(grid.cells()), 0);
  std::vector<nn::Tensor> constants(static_cast<std::size_t>(grid.cells()));
  for (int t = 0; t < batch.targets.size(); ++t) {
    const int idx = grid.index(batch.targets.coords[static_cast<std::size_t>(t)]);
    slots[static_cast<std::size_t>(idx)] = coarse.per_target[static_cast<std::size_t>(t)].image;
    use_node[static_cast<std::size_t>(idx)] = 1;
  }
  for (std::size_t k = 0; k < batch.pattern.coords.size(); ++k) {
    const int idx = grid.index(batch.pattern.coords[k]);
    constants[static_cast<std::size_t>(idx)] = nn::tensor_from_image(batch.inputs[k]);
  }
  nn::Tape::NodeId stack = tape.stack_batch(slots, constants, use_node);
  nn::Tape::NodeId refined = model::refine_nodes(tape, stack, grid, batch.gt.height(),
                                                 batch.gt.width(), model_cfg, bound);
  loss::TotalLossNodes total =
      loss::total_loss_nodes(tape, batch.gt, coarse, refined, weights, normalize);
  return {std::move(bound), total};
}

}  // namespace

nn::LossEval evaluate_batch(const nn::ParamStore& params, const TrainingBatch& batch,
                            const ModelConfig& model_cfg, const loss::LossWeights& weights,
                            bool normalize) {
  nn::Tape tape;
  BuiltLoss built = build_loss_graph(tape, params, batch, model_cfg, weights, normalize, true);
  nn::LossEval out;
  out.value = static_cast<double>(tape.value(built.total.total).scalar());
  if (!std::isfinite(out.value))
    throw Error("non-finite training loss (graph value " + std::to_string(out.value) + ")");
  tape.backward(built.total.total);
  out.grads = model::collect_grads(tape, built.bound);
  return out;
}

double batch_loss_value(const nn::ParamStore& params, const TrainingBatch& batch,
                        const ModelConfig& model_cfg, const loss::LossWeights& weights,
                        bool normalize) {
  nn::Tape tape;
  BuiltLoss built = build_loss_graph(tape, params, batch, model_cfg, weights, normalize, false);
  return static_cast<double>(tape.value(built.total.total).scalar());
}

double train_step(nn::ParamStore& params, const TrainingBatch& batch, const ModelConfig& model_cfg,
                  const loss::LossWeights& weights, const TrainConfig& cfg, double lr) {
  nn::LossEval outcome = evaluate_batch(params, batch, model_cfg, weights);
  nn::AdamConfig adam;
  adam.lr = lr;
  adam.beta1 = cfg.beta1;
  adam.beta2 = cfg.beta2;
  adam.eps = cfg.eps;
  adam_step(params, outcome.grads, adam);
  return outcome.value;
}

TrainResult train(const std::vector<LightField>& dataset, const ModelConfig& model_cfg,
                  const TrainConfig& cfg, const loss::LossWeights& weights,
                  const TrainProgress& should_stop) {
  if (dataset.empty()) throw Error("empty training dataset");
  model_cfg.validate();
  for (const LightField& lf : dataset) cfg.validate(lf.grid(), lf.width(), lf.height());

  Rng rng(cfg.seed);
  Rng init_rng = rng.fork(0);
  Rng data_rng = rng.fork(1);

  TrainResult result;
  result.params = model::init_params(model_cfg, init_rng);

  double lr = cfg.lr;
  std::deque<double> window;
  double window_sum = 0.0;
  double best_ma = std::numeric_limits<double>::infinity();
  int stall = 0;

  nn::AdamConfig adam;
  adam.beta1 = cfg.beta1;
  adam.beta2 = cfg.beta2;
  adam.eps = cfg.eps;

  for (int iter = 0; iter < cfg.max_iterations; ++iter) {
    // accumulate gradients over `batch` sampled patches
    double loss_sum = 0.0;
    std::map<std::string, nn::Tensor> grad_acc;
    for (int b = 0; b < cfg.batch; ++b) {
      const std::size_t lf_index =
          dataset.size() > 1 ? static_cast<std::size_t>(data_rng.uniform_int(dataset.size())) : 0;
      TrainingBatch batch = sample_training_patch(dataset[lf_index], cfg, data_rng);
      nn::LossEval outcome = evaluate_batch(result.params, batch, model_cfg, weights);
      loss_sum += outcome.value;
      if (grad_acc.empty()) {
        grad_acc = std::move(outcome.grads);
      } else {
        for (auto& [name, g] : outcome.grads) {
          nn::Tensor& acc = grad_acc.at(name);
          for (std::int64_t i = 0; i < g.numel(); ++i) acc.v[i] += g.v[i];
        }
      }
    }
    if (cfg.batch > 1)
      for (auto& [name, g] : grad_acc)
        for (auto& v : g.v) v /= static_cast<real>(cfg.batch);
    const double loss = loss_sum / cfg.batch;

    adam.lr = lr;
    adam_step(result.params, grad_acc, adam);
    if (!result.params.all_finite())
      throw Error("parameters became non-finite at iteration " + std::to_string(iter));

    result.trace.push_back({iter, loss, lr});

    // plateau detection on the moving average
    window.push_back(loss);
    window_sum += loss;
    if (static_cast<int>(window.size()) > cfg.ma_window) {
      window_sum -= window.front();
      window.pop_front();
    }
    const double ma = window_sum / static_cast<double>(window.size());
    if (ma < best_ma * (1.0 - cfg.plateau_delta)) {
      best_ma = ma;
      stall = 0;
    } else if (++stall >= cfg.plateau_patience) {
      lr *= 0.5;
      stall = 0;
    }

    if (should_stop && should_stop(iter, result.params)) break;
  }
  return result;
}

void write_trace_csv(const std::string& path, const std::vector<TraceEntry>& trace) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out << "iteration,loss,lr\n";
  for (const TraceEntry& e : trace) {
    char line[96];
    std::snprintf(line, sizeof(line), "%d,%.17g,%.17g\n", e.iteration, e.loss, e.lr);
    out << line;
  }
  if (!out) throw Error("I/O failure writing '" + path + "'");
}

}  // namespace lfkit
