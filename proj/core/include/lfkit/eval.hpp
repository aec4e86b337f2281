// Copyright 2026 The lfkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lfkit/geometry.hpp"
#include "lfkit/light_field.hpp"
#include "lfkit/rng.hpp"

namespace lfkit {

// 10*log10(peak^2 / MSE); +inf when MSE == 0. Reports cap it at 100 dB.
double psnr(const Image& a, const Image& b, double peak = 1.0);
double psnr_capped(const Image& a, const Image& b, double peak = 1.0);

// Mean local SSIM, 11x11 Gaussian window sigma 1.5, K1=0.01 K2=0.03, peak 1.
// Gaussian windows fully inside the image only; images must be >= 11 px.
double ssim(const Image& a, const Image& b);

struct EvalReport {
  struct PerView {
    AngularCoord coord;
    double psnr = 0.0;
    double ssim = 0.0;
  };
  std::vector<PerView> views;
  double mean_psnr = 0.0;
  double mean_ssim = 0.0;
  int view_count = 0;

  std::string to_json() const;
  std::string to_csv() const;
};

// Metrics per novel view (pattern positions excluded), averaged. Color inputs
// are compared on BT.601 luminance.
EvalReport evaluate(const LightField& recon, const LightField& gt,
                    const SamplingPattern& pattern);

// One fronto-parallel textured layer. The texture is a band-limited sum of
// sinusoids (amplitudes summing to <= 0.45 around a 0.5 base, so samples stay
// inside [0,1] without clipping); the opacity mask is an analytic shape.
struct SceneLayer {
  double disparity = 0.0;
  enum class Shape { kFull, kRect, kDisk } shape = Shape::kFull;
  // Rect: [x0,x1) x [y0,y1); disk: center (cx, cy) radius r. Canonical-view
  // pixel coordinates.
  double x0 = 0, y0 = 0, x1 = 0, y1 = 0;
  double cx = 0, cy = 0, r = 0;
  int texture_waves = 8;  // number of sinusoids, <= 8
};

struct SceneSpec {
  AngularGrid grid{5, 5};
  int width = 64;
  int height = 64;
  int channels = 1;
  double d_min = -2.0;
  double d_max = 2.0;
  std::vector<SceneLayer> layers;  // layers[0] is the full-coverage background
  double max_frequency = 0.06;     // cycles/pixel, keeps bilinear error small
};

// Rendered scene with analytic ground truth. Views satisfy
// I_q(x) = I_p(x + d (q - p)) exactly outside occlusions.
class SyntheticScene {
 public:
  const LightField& light_field() const { return lf_; }
  const SceneSpec& spec() const { return spec_; }

  // Front-most layer disparity per pixel.
  DisparityMap ground_truth_disparity(AngularCoord view) const;

  // 1 where a pixel of `target` is invisible from `source` (occluded by a
  // closer layer or out of frame).
  Image occlusion_mask_analytic(AngularCoord target, AngularCoord source) const;

 private:
  friend SyntheticScene make_synthetic_scene(const SceneSpec&, Rng&);

  struct Wave {
    double fx, fy, phase, amplitude;
  };
  struct LayerData {
    SceneLayer layer;
    std::vector<Wave> waves;  // one set per channel
    int channels = 1;
  };

  double texture_at(const LayerData& ld, int channel, double x, double y) const;
  bool mask_at(const LayerData& ld, double x, double y) const;
  // Index into layers_ of the front-most covering layer at a continuous
  // position of view `view` (layers never fully vanish: index 0 covers all).
  int owner_at(AngularCoord view, double x, double y) const;

  SceneSpec spec_;
  std::vector<LayerData> layers_;
  LightField lf_;
  double canon_u_ = 0, canon_v_ = 0;
};

// Renders the spec. Textures and phases draw from rng; layer order in the
// spec is kept (layers must be listed far to near, background first).
SyntheticScene make_synthetic_scene(const SceneSpec& spec, Rng& rng);

// Occlusion from disparity alone: forward-project target pixels into the
// source view with a max-disparity z-buffer; pixels covered by a closer
// surface or projecting outside the frame are masked.
Image occlusion_mask(const DisparityMap& target_disparity, AngularCoord target,
                     AngularCoord source);

// Convenience spec: `layer_count` layers with disparities spread over
// [d_lo, d_hi]; background plus centered shapes.
SceneSpec simple_scene_spec(AngularGrid grid, int width, int height, int layer_count,
                            double d_lo, double d_hi);

}  // namespace lfkit
