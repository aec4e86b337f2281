// Copyright 2026 The lfkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lfkit/geometry.hpp"
#include "lfkit/light_field.hpp"
#include "lfkit/nn/optim.hpp"
#include "lfkit/nn/tape.hpp"

namespace lfkit {

// Architecture of the two-phase reconstruction network. Defaults follow the
// reference configuration; tests and toy training shrink the widths.
struct ModelConfig {
  int k_max = 4;  // input-slot capacity of the cost calculator

  // disparity planes
  int planes = 32;
  double d_min = -4.0;
  double d_max = 4.0;

  // cost calculator: per-plane shared-weight convs over K slabs (+ presence
  // channel); last width is the per-plane feature count
  std::vector<int> cost_widths = {16, 16, 16, 4};
  int cost_kernel = 5;

  // disparity/confidence estimator over the L*Cf concatenated features;
  // a final conv emits 1 + k_max channels
  std::vector<int> estimator_widths = {200, 200, 64, 32, 16};
  int estimator_kernel = 3;

  // pseudo-4D refinement: alternating spatial/angular conv pairs plus a
  // per-view residual head (two spatial convs)
  int refine_pairs = 3;
  int refine_channels = 32;
  int refine_spatial_kernel = 3;
  int refine_angular_kernel = 3;

  nn::Act hidden_activation = nn::Act::kLeakyRelu;
  double leaky_alpha = 0.1;

  int cost_feature_channels() const { return cost_widths.back(); }
  void validate() const;

  std::string to_json() const;
  static ModelConfig from_json(const std::string& text);
};

// Coarse-phase result: the intermediate light field (inputs copied verbatim
// at pattern positions) plus per-target by-products.
struct CoarseOutput {
  LightField intermediate;  // single channel
  TargetSet targets;
  std::vector<DisparityMap> disparities;
  std::vector<ConfidenceMaps> confidences;
};

namespace model {

// Deterministic parameter init from one seed (uniform fan-in scaling).
nn::ParamStore init_params(const ModelConfig& cfg, Rng& rng);

// Parameters bound into a tape; trainable binds leaves, inference binds
// constants (no backward bookkeeping).
struct BoundParams {
  nn::Tape* tape = nullptr;
  std::map<std::string, nn::Tape::NodeId> nodes;

  nn::Tape::NodeId operator[](const std::string& name) const {
    auto it = nodes.find(name);
    if (it == nodes.end()) throw Error("unbound parameter '" + name + "'");
    return it->second;
  }
};
BoundParams bind_params(nn::Tape& tape, const nn::ParamStore& store, bool trainable);

// Gradients of every bound parameter after tape.backward().
std::map<std::string, nn::Tensor> collect_grads(const nn::Tape& tape, const BoundParams& bound);

// Shared-weight cost features for every plane of a PSV: [L, Cf, H, W].
// Slots beyond the actual K are zero slabs; one extra channel carries the
// present-slot fraction.
nn::Tape::NodeId cost_features(nn::Tape& tape, const PlaneSweepVolume& psv,
                               const ModelConfig& cfg, const BoundParams& params);

struct DisparityConfidenceNodes {
  nn::Tape::NodeId disparity;   // [1,1,H,W], tanh-clamped to [d_min, d_max]
  nn::Tape::NodeId confidence;  // [1,K,H,W], softmax over K
};
DisparityConfidenceNodes predict_disparity_confidence(nn::Tape& tape,
                                                      nn::Tape::NodeId features, int k,
                                                      const ModelConfig& cfg,
                                                      const BoundParams& params);

struct ViewNodes {
  nn::Tape::NodeId image;  // [1,1,H,W]
  DisparityConfidenceNodes estimate;
};
// Full coarse path for one target: PSV -> cost features -> estimator ->
// warp -> confidence blend. Differentiable end to end.
ViewNodes synthesize_view_nodes(nn::Tape& tape, const std::vector<Image>& inputs,
                                const SamplingPattern& pattern, AngularCoord target,
                                const ModelConfig& cfg, const BoundParams& params);

struct CoarseNodes {
  std::vector<ViewNodes> per_target;  // aligned with targets
  TargetSet targets;
};
CoarseNodes coarse_synthesis_nodes(nn::Tape& tape, const std::vector<Image>& inputs,
                                   const SamplingPattern& pattern, const TargetSet& targets,
                                   const ModelConfig& cfg, const BoundParams& params);

// Pseudo-4D refinement over an [M*N, 1, H, W] stack of intermediate views:
// alternating spatial/angular convs, then a shared per-view residual head.
// Returns intermediate + residual, same shape.
nn::Tape::NodeId refine_nodes(nn::Tape& tape, nn::Tape::NodeId intermediate_stack,
                              const AngularGrid& grid, int height, int width,
                              const ModelConfig& cfg, const BoundParams& params);

}  // namespace model

// --- plain (inference) wrappers ---

// Single-channel inputs; returns the synthesized view and its by-products.
struct SynthesizedView {
  Image image;
  DisparityMap disparity;
  ConfidenceMaps confidence;
};
SynthesizedView synthesize_view(const std::vector<Image>& inputs, const SamplingPattern& pattern,
                                AngularCoord target, const ModelConfig& cfg,
                                const nn::ParamStore& params);

CoarseOutput coarse_synthesis(const std::vector<Image>& inputs, const SamplingPattern& pattern,
                              const TargetSet& targets, const AngularGrid& grid,
                              const ModelConfig& cfg, const nn::ParamStore& params);

// Refinement of a full single-channel light field (every view refined).
LightField refine_lightfield(const LightField& intermediate, const ModelConfig& cfg,
                             const nn::ParamStore& params);

// End-to-end reconstruction. Inputs are views at the pattern positions (1 or
// 3 channels). For color, luminance runs through the network; chroma is
// warped with the predicted disparity and blended with the same confidences;
// refinement touches luminance only. Views at pattern positions are returned
// verbatim.
LightField reconstruct(const std::vector<Image>& inputs, const SamplingPattern& pattern,
                       const AngularGrid& grid, const ModelConfig& cfg,
                       const nn::ParamStore& params);

// Warp + blend with an injected disparity map (bypasses the estimator).
// Uniform confidences unless given.
Image synthesize_with_disparity(const std::vector<Image>& inputs, const SamplingPattern& pattern,
                                AngularCoord target, const DisparityMap& disparity,
                                const std::optional<ConfidenceMaps>& confidence = std::nullopt);

// Model checkpoint = parameter checkpoint with the config embedded in the
// manifest.
void save_model(const nn::ParamStore& params, const ModelConfig& cfg, const std::string& path,
                std::uint64_t seed);
struct LoadedModel {
  nn::ParamStore params;
  ModelConfig config;
};
LoadedModel load_model(const std::string& path);

}  // namespace lfkit
