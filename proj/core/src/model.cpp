// Copyright 2026 The lfkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "lfkit/model.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

using nlohmann::json;

namespace lfkit {

namespace {

nn::Act act_from_string(const std::string& s) {
  if (s == "identity") return nn::Act::kIdentity;
  if (s == "relu") return nn::Act::kRelu;
  if (s == "leaky_relu") return nn::Act::kLeakyRelu;
  if (s == "tanh") return nn::Act::kTanh;
  if (s == "softplus") return nn::Act::kSoftplus;
  throw Error("unknown activation '" + s + "'");
}

std::string act_to_string(nn::Act a) {
  switch (a) {
    case nn::Act::kIdentity: return "identity";
    case nn::Act::kRelu: return "relu";
    case nn::Act::kLeakyRelu: return "leaky_relu";
    case nn::Act::kTanh: return "tanh";
    case nn::Act::kSoftplus: return "softplus";
  }
  return "identity";
}

}  // namespace

void ModelConfig::validate() const {
  if (k_max < 1) throw Error("k_max must be positive");
  if (planes < 2) throw Error("need at least two disparity planes");
  if (!(d_max > d_min)) throw Error("d_max must exceed d_min");
  if (cost_widths.empty() || estimator_widths.empty()) throw Error("empty layer widths");
  for (int w : cost_widths)
    if (w < 1) throw Error("bad cost width");
  for (int w : estimator_widths)
    if (w < 1) throw Error("bad estimator width");
  if (cost_kernel % 2 == 0 || estimator_kernel % 2 == 0 || refine_spatial_kernel % 2 == 0 ||
      refine_angular_kernel % 2 == 0)
    throw Error("kernels must be odd");
  if (refine_pairs < 1 || refine_channels < 1) throw Error("bad refinement config");
}

std::string ModelConfig::to_json() const {
  json j;
  j["k_max"] = k_max;
  j["planes"] = planes;
  j["d_min"] = d_min;
  j["d_max"] = d_max;
  j["cost_widths"] = cost_widths;
  j["cost_kernel"] = cost_kernel;
  j["estimator_widths"] = estimator_widths;
  j["estimator_kernel"] = estimator_kernel;
  j["refine_pairs"] = refine_pairs;
  j["refine_channels"] = refine_channels;
  j["refine_spatial_kernel"] = refine_spatial_kernel;
  j["refine_angular_kernel"] = refine_angular_kernel;
  j["hidden_activation"] = act_to_string(hidden_activation);
  j["leaky_alpha"] = leaky_alpha;
  return j.dump();
}

ModelConfig ModelConfig::from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(std::string("bad model config JSON: ") + e.what());
  }
  ModelConfig cfg;
  cfg.k_max = j.value("k_max", cfg.k_max);
  cfg.planes = j.value("planes", cfg.planes);
  cfg.d_min = j.value("d_min", cfg.d_min);
  cfg.d_max = j.value("d_max", cfg.d_max);
  cfg.cost_widths = j.value("cost_widths", cfg.cost_widths);
  cfg.cost_kernel = j.value("cost_kernel", cfg.cost_kernel);
  cfg.estimator_widths = j.value("estimator_widths", cfg.estimator_widths);
  cfg.estimator_kernel = j.value("estimator_kernel", cfg.estimator_kernel);
  cfg.refine_pairs = j.value("refine_pairs", cfg.refine_pairs);
  cfg.refine_channels = j.value("refine_channels", cfg.refine_channels);
  cfg.refine_spatial_kernel = j.value("refine_spatial_kernel", cfg.refine_spatial_kernel);
  cfg.refine_angular_kernel = j.value("refine_angular_kernel", cfg.refine_angular_kernel);
  if (j.contains("hidden_activation"))
    cfg.hidden_activation = act_from_string(j["hidden_activation"].get<std::string>());
  cfg.leaky_alpha = j.value("leaky_alpha", cfg.leaky_alpha);
  cfg.validate();
  return cfg;
}

namespace model {

nn::ParamStore init_params(const ModelConfig& cfg, Rng& rng) {
  cfg.validate();
  nn::ParamStore store;
  std::uint64_t stream = 0;
  const auto add_conv = [&](const std::string& name, int c_out, int c_in, int k, bool zero) {
    Rng wrng = rng.fork(stream++);
    const int fan_in = c_in * k * k;
    nn::Tensor w = zero ? nn::Tensor({c_out, c_in, k, k})
                        : nn::uniform_fan_in({c_out, c_in, k, k}, fan_in, wrng);
    store.add(name + ".w", std::move(w));
    store.add(name + ".b", nn::Tensor({c_out}));
  };

  // cost calculator
  int c_in = cfg.k_max + 1;  // slabs + presence channel
  for (std::size_t i = 0; i < cfg.cost_widths.size(); ++i) {
    add_conv("cost." + std::to_string(i), cfg.cost_widths[i], c_in, cfg.cost_kernel, false);
    c_in = cfg.cost_widths[i];
  }

  // estimator
  c_in = cfg.planes * cfg.cost_feature_channels();
  for (std::size_t i = 0; i < cfg.estimator_widths.size(); ++i) {
    add_conv("est." + std::to_string(i), cfg.estimator_widths[i], c_in, cfg.estimator_kernel,
             false);
    c_in = cfg.estimator_widths[i];
  }
  add_conv("est.out", 1 + cfg.k_max, c_in, cfg.estimator_kernel, false);

  // refinement
  add_conv("refine.lift", cfg.refine_channels, 1, cfg.refine_spatial_kernel, false);
  for (int r = 0; r < cfg.refine_pairs; ++r) {
    add_conv("refine." + std::to_string(r) + ".spa", cfg.refine_channels, cfg.refine_channels,
             cfg.refine_spatial_kernel, false);
    add_conv("refine." + std::to_string(r) + ".ang", cfg.refine_channels, cfg.refine_channels,
             cfg.refine_angular_kernel, false);
  }
  add_conv("head.0", cfg.refine_channels, cfg.refine_channels, cfg.refine_spatial_kernel, false);
  // zero-initialized final head: refinement starts as the identity
  add_conv("head.1", 1, cfg.refine_channels, cfg.refine_spatial_kernel, true);
  return store;
}

BoundParams bind_params(nn::Tape& tape, const nn::ParamStore& store, bool trainable) {
  BoundParams bound;
  bound.tape = &tape;
  for (const auto& [name, entry] : store.entries())
    bound.nodes[name] = trainable ? tape.leaf(entry.value) : tape.constant(entry.value);
  return bound;
}

std::map<std::string, nn::Tensor> collect_grads(const nn::Tape& tape, const BoundParams& bound) {
  std::map<std::string, nn::Tensor> grads;
  for (const auto& [name, id] : bound.nodes) {
    const nn::Tensor& g = tape.grad(id);
    grads[name] = g.v.empty() ? nn::Tensor(tape.value(id).shape) : g;
  }
  return grads;
}

namespace {

nn::Tape::NodeId conv_block(nn::Tape& tape, nn::Tape::NodeId x, const std::string& name,
                            const BoundParams& params, nn::Act act, double alpha) {
  nn::Tape::NodeId y = tape.conv2d(x, params[name + ".w"], params[name + ".b"]);
  return tape.activation(y, act, static_cast<real>(alpha));
}

// [L, k_max+1, H, W] constant: zero-padded slabs plus the presence fraction.
nn::Tensor psv_tensor(const PlaneSweepVolume& psv, const ModelConfig& cfg) {
  const int k = psv.view_count();
  const int l = psv.plane_count();
  const int height = psv.slabs[0][0].height;
  const int width = psv.slabs[0][0].width;
  nn::Tensor t({l, cfg.k_max + 1, height, width});
  const std::int64_t plane = static_cast<std::int64_t>(height) * width;
  const real presence = static_cast<real>(k) / static_cast<real>(cfg.k_max);
  for (int li = 0; li < l; ++li) {
    for (int ki = 0; ki < k; ++ki) {
      const Image& slab = psv.slabs[ki][li];
      real* dst = t.data() + (static_cast<std::int64_t>(li) * (cfg.k_max + 1) + ki) * plane;
      for (std::int64_t i = 0; i < plane; ++i) dst[i] = static_cast<real>(slab.data[i]);
    }
    real* mask = t.data() + (static_cast<std::int64_t>(li) * (cfg.k_max + 1) + cfg.k_max) * plane;
    for (std::int64_t i = 0; i < plane; ++i) mask[i] = presence;
  }
  return t;
}

}  // namespace

nn::Tape::NodeId cost_features(nn::Tape& tape, const PlaneSweepVolume& psv,
                               const ModelConfig& cfg, const BoundParams& params) {
  if (psv.view_count() > cfg.k_max)
    throw Error("PSV has " + std::to_string(psv.view_count()) +
                " views, exceeding the configured capacity " + std::to_string(cfg.k_max));
  if (psv.plane_count() != cfg.planes)
    throw Error("PSV plane count does not match the configuration");
  nn::Tape::NodeId x = tape.constant(psv_tensor(psv, cfg));
  for (std::size_t i = 0; i < cfg.cost_widths.size(); ++i) {
    const bool last = i + 1 == cfg.cost_widths.size();
    x = conv_block(tape, x, "cost." + std::to_string(i), params,
                   last ? nn::Act::kIdentity : cfg.hidden_activation, cfg.leaky_alpha);
  }
  return x;  // [L, Cf, H, W]
}

DisparityConfidenceNodes predict_disparity_confidence(nn::Tape& tape, nn::Tape::NodeId features,
                                                      int k, const ModelConfig& cfg,
                                                      const BoundParams& params) {
  const nn::Tensor& f = tape.value(features);
  if (f.rank() != 4 || f.dim(0) != cfg.planes || f.dim(1) != cfg.cost_feature_channels())
    throw Error("unexpected cost feature shape " + f.shape_str());
  if (k < 1 || k > cfg.k_max) throw Error("bad view count " + std::to_string(k));
  const int height = f.dim(2), width = f.dim(3);
  // concatenating per-plane features = flattening the plane axis into channels
  nn::Tape::NodeId x =
      tape.reshape(features, {1, cfg.planes * cfg.cost_feature_channels(), height, width});
  for (std::size_t i = 0; i < cfg.estimator_widths.size(); ++i)
    x = conv_block(tape, x, "est." + std::to_string(i), params, cfg.hidden_activation,
                   cfg.leaky_alpha);
  nn::Tape::NodeId out = tape.conv2d(x, params["est.out.w"], params["est.out.b"]);

  // channel 0: disparity, clamped to [d_min, d_max] through a scaled tanh
  nn::Tape::NodeId braw = tape.slice_channels(out, 0, 1);
  const real half = static_cast<real>(0.5 * (cfg.d_max - cfg.d_min));
  const real center = static_cast<real>(0.5 * (cfg.d_max + cfg.d_min));
  nn::Tape::NodeId disp = tape.affine(tape.activation(braw, nn::Act::kTanh), half, center);

  // channels 1..K: confidence logits for the present inputs
  nn::Tape::NodeId conf = tape.channel_softmax(tape.slice_channels(out, 1, 1 + k));
  return {disp, conf};
}

ViewNodes synthesize_view_nodes(nn::Tape& tape, const std::vector<Image>& inputs,
                                const SamplingPattern& pattern, AngularCoord target,
                                const ModelConfig& cfg, const BoundParams& params) {
  if (inputs.empty() || inputs.size() != pattern.coords.size())
    throw Error("inputs do not match pattern");
  for (const Image& img : inputs)
    if (img.channels != 1) throw Error("network inputs must be single channel");

  const PlaneSweepVolume psv =
      build_psv(inputs, pattern, target, uniform_planes(cfg.planes, cfg.d_min, cfg.d_max));
  nn::Tape::NodeId features = cost_features(tape, psv, cfg, params);
  DisparityConfidenceNodes est = predict_disparity_confidence(
      tape, features, static_cast<int>(inputs.size()), cfg, params);

  std::vector<nn::Tape::NodeId> contributions;
  for (std::size_t k = 0; k < inputs.size(); ++k) {
    const AngularCoord p = pattern.coords[k];
    nn::Tape::NodeId warped = tape.warp_image(inputs[k], est.disparity,
                                              static_cast<double>(target.u - p.u),
                                              static_cast<double>(target.v - p.v));
    nn::Tape::NodeId weight =
        tape.slice_channels(est.confidence, static_cast<int>(k), static_cast<int>(k) + 1);
    contributions.push_back(tape.mul(weight, warped));
  }
  return {tape.add_many(contributions), est};
}

CoarseNodes coarse_synthesis_nodes(nn::Tape& tape, const std::vector<Image>& inputs,
                                   const SamplingPattern& pattern, const TargetSet& targets,
                                   const ModelConfig& cfg, const BoundParams& params) {
  CoarseNodes out;
  out.targets = targets;
  for (const AngularCoord& q : targets.coords) {
    if (pattern.contains(q)) throw Error("target collides with pattern position");
    out.per_target.push_back(synthesize_view_nodes(tape, inputs, pattern, q, cfg, params));
  }
  return out;
}

nn::Tape::NodeId refine_nodes(nn::Tape& tape, nn::Tape::NodeId intermediate_stack,
                              const AngularGrid& grid, int height, int width,
                              const ModelConfig& cfg, const BoundParams& params) {
  const nn::Tensor& t = tape.value(intermediate_stack);
  if (t.rank() != 4 || t.dim(0) != grid.cells() || t.dim(1) != 1 || t.dim(2) != height ||
      t.dim(3) != width)
    throw Error("refine expects [M*N,1,H,W] stack, got " + t.shape_str());
  if (grid.rows < cfg.refine_angular_kernel || grid.cols < cfg.refine_angular_kernel)
    throw Error("angular grid smaller than the angular kernel");

  nn::FeatureStack f;
  f.node = conv_block(tape, intermediate_stack, "refine.lift", params, cfg.hidden_activation,
                      cfg.leaky_alpha);
  f.layout = nn::StackLayout::kSpatial;
  f.rows = grid.rows;
  f.cols = grid.cols;
  f.height = height;
  f.width = width;
  f.channels = cfg.refine_channels;
  for (int r = 0; r < cfg.refine_pairs; ++r) {
    const std::string base = "refine." + std::to_string(r);
    f.node = conv_block(tape, f.node, base + ".spa", params, cfg.hidden_activation,
                        cfg.leaky_alpha);
    f = nn::relayout(tape, f);  // spatial -> angular
    f.node = conv_block(tape, f.node, base + ".ang", params, cfg.hidden_activation,
                        cfg.leaky_alpha);
    f = nn::relayout(tape, f);  // angular -> spatial
  }
  f.node = conv_block(tape, f.node, "head.0", params, cfg.hidden_activation, cfg.leaky_alpha);
  nn::Tape::NodeId residual = tape.conv2d(f.node, params["head.1.w"], params["head.1.b"]);
  return tape.add(intermediate_stack, residual);
}

}  // namespace model

// --- plain wrappers ---

namespace {

DisparityMap disparity_from_node(const nn::Tape& tape, nn::Tape::NodeId node,
                                 AngularCoord target) {
  DisparityMap dm;
  dm.target = target;
  dm.map = nn::image_from_tensor(tape.value(node));
  return dm;
}

ConfidenceMaps confidence_from_node(const nn::Tape& tape, nn::Tape::NodeId node,
                                    AngularCoord target) {
  const nn::Tensor& t = tape.value(node);
  ConfidenceMaps cm;
  cm.target = target;
  const int k = t.dim(1), height = t.dim(2), width = t.dim(3);
  const std::int64_t plane = static_cast<std::int64_t>(height) * width;
  for (int c = 0; c < k; ++c) {
    Image m(width, height, 1);
    for (std::int64_t i = 0; i < plane; ++i)
      m.data[static_cast<std::size_t>(i)] = static_cast<float>(t.v[c * plane + i]);
    cm.maps.push_back(std::move(m));
  }
  return cm;
}

struct YcbcrViews {
  std::vector<Image> y, cb, cr;
};

YcbcrViews split_ycbcr(const std::vector<Image>& rgb) {
  YcbcrViews out;
  for (const Image& img : rgb) {
    Image y(img.width, img.height, 1), cb(img.width, img.height, 1), cr(img.width, img.height, 1);
    for (int yy = 0; yy < img.height; ++yy)
      for (int xx = 0; xx < img.width; ++xx) {
        const float r = img.at(xx, yy, 0), g = img.at(xx, yy, 1), b = img.at(xx, yy, 2);
        const float luma = 0.299f * r + 0.587f * g + 0.114f * b;
        y.at(xx, yy) = luma;
        cb.at(xx, yy) = 0.564f * (b - luma) + 0.5f;
        cr.at(xx, yy) = 0.713f * (r - luma) + 0.5f;
      }
    out.y.push_back(std::move(y));
    out.cb.push_back(std::move(cb));
    out.cr.push_back(std::move(cr));
  }
  return out;
}

Image merge_ycbcr(const Image& y, const Image& cb, const Image& cr) {
  Image out(y.width, y.height, 3);
  for (int yy = 0; yy < y.height; ++yy)
    for (int xx = 0; xx < y.width; ++xx) {
      const float luma = y.at(xx, yy);
      const float db = (cb.at(xx, yy) - 0.5f) / 0.564f;
      const float dr = (cr.at(xx, yy) - 0.5f) / 0.713f;
      const float r = luma + dr;
      const float b = luma + db;
      const float g = (luma - 0.299f * r - 0.114f * b) / 0.587f;
      out.at(xx, yy, 0) = std::clamp(r, 0.0f, 1.0f);
      out.at(xx, yy, 1) = std::clamp(g, 0.0f, 1.0f);
      out.at(xx, yy, 2) = std::clamp(b, 0.0f, 1.0f);
    }
  return out;
}

}  // namespace

SynthesizedView synthesize_view(const std::vector<Image>& inputs, const SamplingPattern& pattern,
                                AngularCoord target, const ModelConfig& cfg,
                                const nn::ParamStore& params) {
  nn::Tape tape;
  model::BoundParams bound = model::bind_params(tape, params, false);
  model::ViewNodes nodes = model::synthesize_view_nodes(tape, inputs, pattern, target, cfg, bound);
  SynthesizedView out;
  out.image = nn::image_from_tensor(tape.value(nodes.image));
  out.disparity = disparity_from_node(tape, nodes.estimate.disparity, target);
  out.confidence = confidence_from_node(tape, nodes.estimate.confidence, target);
  return out;
}

CoarseOutput coarse_synthesis(const std::vector<Image>& inputs, const SamplingPattern& pattern,
                              const TargetSet& targets, const AngularGrid& grid,
                              const ModelConfig& cfg, const nn::ParamStore& params) {
  pattern.validate(grid);
  if (inputs.size() != pattern.coords.size()) throw Error("inputs do not match pattern");
  if (inputs.empty()) throw Error("no inputs");
  const int width = inputs[0].width, height = inputs[0].height;

  CoarseOutput out;
  out.intermediate = LightField(grid, width, height, 1);
  out.targets = targets;
  for (std::size_t k = 0; k < inputs.size(); ++k)
    out.intermediate.set_view(pattern.coords[k], inputs[k]);

  for (const AngularCoord& q : targets.coords) {
    SynthesizedView sv = synthesize_view(inputs, pattern, q, cfg, params);
    out.intermediate.set_view(q, sv.image);
    out.disparities.push_back(std::move(sv.disparity));
    out.confidences.push_back(std::move(sv.confidence));
  }
  return out;
}

LightField refine_lightfield(const LightField& intermediate, const ModelConfig& cfg,
                             const nn::ParamStore& params) {
  if (intermediate.channels() != 1) throw Error("refinement expects a single channel");
  nn::Tape tape;
  model::BoundParams bound = model::bind_params(tape, params, false);
  const AngularGrid& grid = intermediate.grid();

  std::vector<nn::Tape::NodeId> slots(static_cast<std::size_t>(grid.cells()), -1);
  std::vector<nn::Tensor> constants;
  std::vector<int> use_node(static_cast<std::size_t>(grid.cells()), 0);
  constants.reserve(slots.size());
  for (int i = 0; i < grid.cells(); ++i)
    constants.push_back(nn::tensor_from_image(intermediate.view(grid.coord(i))));
  nn::Tape::NodeId stack = tape.stack_batch(slots, constants, use_node);
  nn::Tape::NodeId refined = model::refine_nodes(tape, stack, grid, intermediate.height(),
                                                 intermediate.width(), cfg, bound);

  LightField out(grid, intermediate.width(), intermediate.height(), 1);
  const nn::Tensor& t = tape.value(refined);
  const std::int64_t stride = t.numel() / grid.cells();
  for (int i = 0; i < grid.cells(); ++i) {
    Image view(intermediate.width(), intermediate.height(), 1);
    for (std::int64_t j = 0; j < stride; ++j)
      view.data[static_cast<std::size_t>(j)] = static_cast<float>(t.v[i * stride + j]);
    out.set_view(grid.coord(i), view);
  }
  return out;
}

LightField reconstruct(const std::vector<Image>& inputs, const SamplingPattern& pattern,
                       const AngularGrid& grid, const ModelConfig& cfg,
                       const nn::ParamStore& params) {
  pattern.validate(grid);
  if (inputs.size() != pattern.coords.size()) throw Error("inputs do not match pattern");
  if (inputs.empty()) throw Error("no inputs");
  const int width = inputs[0].width, height = inputs[0].height;
  const int channels = inputs[0].channels;
  for (const Image& img : inputs)
    if (img.width != width || img.height != height || img.channels != channels)
      throw Error("input shape mismatch");

  LightField out(grid, width, height, channels);
  const TargetSet targets = complement_pattern(grid, pattern);
  for (std::size_t k = 0; k < inputs.size(); ++k) out.set_view(pattern.coords[k], inputs[k]);
  if (targets.coords.empty()) return out;  // full sampling: nothing to synthesize

  const bool color = channels == 3;
  YcbcrViews ycc;
  const std::vector<Image>* luma_inputs = &inputs;
  if (color) {
    ycc = split_ycbcr(inputs);
    luma_inputs = &ycc.y;
  }

  CoarseOutput coarse = coarse_synthesis(*luma_inputs, pattern, targets, grid, cfg, params);
  LightField refined = refine_lightfield(coarse.intermediate, cfg, params);

  for (std::size_t t = 0; t < targets.coords.size(); ++t) {
    const AngularCoord q = targets.coords[t];
    Image y = refined.view(q);
    if (!color) {
      for (float& v : y.data) v = std::clamp(v, 0.0f, 1.0f);
      out.set_view(q, y);
      continue;
    }
    // chroma: warp every input with the predicted disparity, blend with the
    // same confidences, no refinement
    std::vector<Image> warped_cb, warped_cr;
    for (std::size_t k = 0; k < inputs.size(); ++k) {
      warped_cb.push_back(backward_warp(ycc.cb[k], pattern.coords[k], q, coarse.disparities[t]));
      warped_cr.push_back(backward_warp(ycc.cr[k], pattern.coords[k], q, coarse.disparities[t]));
    }
    const Image cb = blend_confidence(warped_cb, coarse.confidences[t]);
    const Image cr = blend_confidence(warped_cr, coarse.confidences[t]);
    out.set_view(q, merge_ycbcr(y, cb, cr));
  }
  return out;
}

Image synthesize_with_disparity(const std::vector<Image>& inputs, const SamplingPattern& pattern,
                                AngularCoord target, const DisparityMap& disparity,
                                const std::optional<ConfidenceMaps>& confidence) {
  if (inputs.empty() || inputs.size() != pattern.coords.size())
    throw Error("inputs do not match pattern");
  std::vector<Image> warped;
  for (std::size_t k = 0; k < inputs.size(); ++k)
    warped.push_back(backward_warp(inputs[k], pattern.coords[k], target, disparity));
  ConfidenceMaps conf;
  if (confidence) {
    conf = *confidence;
  } else {
    conf.target = target;
    const float w = 1.0f / static_cast<float>(inputs.size());
    for (std::size_t k = 0; k < inputs.size(); ++k)
      conf.maps.emplace_back(inputs[0].width, inputs[0].height, 1, w);
  }
  return blend_confidence(warped, conf);
}

void save_model(const nn::ParamStore& params, const ModelConfig& cfg, const std::string& path,
                std::uint64_t seed) {
  json extra;
  extra["model_config"] = json::parse(cfg.to_json());
  extra["seed"] = seed;
  nn::save_checkpoint(params, path, extra.dump());
}

LoadedModel load_model(const std::string& path) {
  nn::Checkpoint ckpt = nn::load_checkpoint(path);
  json extra = json::parse(ckpt.extra_json);
  if (!extra.contains("model_config"))
    throw Error("checkpoint '" + path + "' has no embedded model config");
  LoadedModel out;
  out.config = ModelConfig::from_json(extra["model_config"].dump());
  out.params = std::move(ckpt.params);
  return out;
}

}  // namespace lfkit
