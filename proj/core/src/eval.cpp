// Copyright 2026 The lfkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "lfkit/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <json.hpp>

namespace lfkit {

double psnr(const Image& a, const Image& b, double peak) {
  if (!a.same_shape(b)) throw Error("psnr: shape mismatch");
  if (a.empty()) throw Error("psnr: empty image");
  double se = 0.0;
  for (std::size_t i = 0; i < a.data.size(); ++i) {
    const double d = static_cast<double>(a.data[i]) - static_cast<double>(b.data[i]);
    se += d * d;
  }
  const double mse = se / static_cast<double>(a.data.size());
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(peak * peak / mse);
}

double psnr_capped(const Image& a, const Image& b, double peak) {
  return std::min(psnr(a, b, peak), 100.0);
}

namespace {

std::vector<double> gaussian_window(int radius, double sigma) {
  std::vector<double> w(2 * radius + 1);
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    w[i + radius] = std::exp(-(i * i) / (2.0 * sigma * sigma));
    sum += w[i + radius];
  }
  for (double& x : w) x /= sum;
  return w;
}

}  // namespace

double ssim(const Image& a, const Image& b) {
  if (!a.same_shape(b)) throw Error("ssim: shape mismatch");
  constexpr int kRadius = 5;  // 11x11 window
  constexpr double kSigma = 1.5;
  constexpr double kC1 = 0.01 * 0.01;
  constexpr double kC2 = 0.03 * 0.03;
  if (a.width < 2 * kRadius + 1 || a.height < 2 * kRadius + 1)
    throw Error("ssim: image smaller than the 11x11 window");

  const Image la = a.channels == 3 ? to_luma(a) : a;
  const Image lb = b.channels == 3 ? to_luma(b) : b;
  static const std::vector<double> kWin = gaussian_window(kRadius, kSigma);

  double total = 0.0;
  std::int64_t count = 0;
  for (int y = kRadius; y < a.height - kRadius; ++y)
    for (int x = kRadius; x < a.width - kRadius; ++x) {
      double mu_a = 0, mu_b = 0;
      for (int j = -kRadius; j <= kRadius; ++j)
        for (int i = -kRadius; i <= kRadius; ++i) {
          const double w = kWin[j + kRadius] * kWin[i + kRadius];
          mu_a += w * la.at(x + i, y + j);
          mu_b += w * lb.at(x + i, y + j);
        }
      double var_a = 0, var_b = 0, cov = 0;
      for (int j = -kRadius; j <= kRadius; ++j)
        for (int i = -kRadius; i <= kRadius; ++i) {
          const double w = kWin[j + kRadius] * kWin[i + kRadius];
          const double da = la.at(x + i, y + j) - mu_a;
          const double db = lb.at(x + i, y + j) - mu_b;
          var_a += w * da * da;
          var_b += w * db * db;
          cov += w * da * db;
        }
      total += ((2 * mu_a * mu_b + kC1) * (2 * cov + kC2)) /
               ((mu_a * mu_a + mu_b * mu_b + kC1) * (var_a + var_b + kC2));
      ++count;
    }
  return total / static_cast<double>(count);
}

EvalReport evaluate(const LightField& recon, const LightField& gt,
                    const SamplingPattern& pattern) {
  if (!(recon.grid() == gt.grid()) || recon.width() != gt.width() ||
      recon.height() != gt.height() || recon.channels() != gt.channels())
    throw Error("evaluate: light field shapes mismatch");
  pattern.validate(gt.grid());

  EvalReport report;
  double psnr_sum = 0.0, ssim_sum = 0.0;
  for (int u = 1; u <= gt.grid().rows; ++u)
    for (int v = 1; v <= gt.grid().cols; ++v) {
      const AngularCoord c{u, v};
      if (pattern.contains(c)) continue;
      Image rv = recon.view(c);
      Image gv = gt.view(c);
      if (rv.channels == 3) {
        rv = to_luma(rv);
        gv = to_luma(gv);
      }
      EvalReport::PerView pv;
      pv.coord = c;
      pv.psnr = psnr_capped(rv, gv);
      pv.ssim = ssim(rv, gv);
      psnr_sum += pv.psnr;
      ssim_sum += pv.ssim;
      report.views.push_back(pv);
    }
  report.view_count = static_cast<int>(report.views.size());
  if (report.view_count > 0) {
    report.mean_psnr = psnr_sum / report.view_count;
    report.mean_ssim = ssim_sum / report.view_count;
  }
  return report;
}

std::string EvalReport::to_json() const {
  nlohmann::json j;
  j["view_count"] = view_count;
  j["mean_psnr"] = mean_psnr;
  j["mean_ssim"] = mean_ssim;
  auto arr = nlohmann::json::array();
  for (const auto& pv : views)
    arr.push_back({{"u", pv.coord.u}, {"v", pv.coord.v}, {"psnr", pv.psnr}, {"ssim", pv.ssim}});
  j["views"] = std::move(arr);
  return j.dump(2);
}

std::string EvalReport::to_csv() const {
  std::ostringstream out;
  out << "u,v,psnr,ssim\n";
  for (const auto& pv : views)
    out << pv.coord.u << "," << pv.coord.v << "," << pv.psnr << "," << pv.ssim << "\n";
  out << "mean,," << mean_psnr << "," << mean_ssim << "\n";
  return out.str();
}

// --- synthetic scenes ---

double SyntheticScene::texture_at(const LayerData& ld, int channel, double x, double y) const {
  double v = 0.5;
  const std::size_t base = static_cast<std::size_t>(channel) * ld.layer.texture_waves;
  for (int i = 0; i < ld.layer.texture_waves; ++i) {
    const Wave& w = ld.waves[base + i];
    v += w.amplitude * std::sin(2.0 * std::numbers::pi * (w.fx * x + w.fy * y) + w.phase);
  }
  return v;
}

bool SyntheticScene::mask_at(const LayerData& ld, double x, double y) const {
  switch (ld.layer.shape) {
    case SceneLayer::Shape::kFull:
      return true;
    case SceneLayer::Shape::kRect:
      return x >= ld.layer.x0 && x < ld.layer.x1 && y >= ld.layer.y0 && y < ld.layer.y1;
    case SceneLayer::Shape::kDisk: {
      const double dx = x - ld.layer.cx, dy = y - ld.layer.cy;
      return dx * dx + dy * dy <= ld.layer.r * ld.layer.r;
    }
  }
  return false;
}

int SyntheticScene::owner_at(AngularCoord view, double x, double y) const {
  // Layer pixel (x,y) of view q comes from canonical position
  // (x + d*dv, y + d*du); the nearest (largest-disparity) covering layer wins.
  const double du = view.u - canon_u_;
  const double dv = view.v - canon_v_;
  int owner = 0;
  double best_d = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    const double d = layers_[i].layer.disparity;
    if (mask_at(layers_[i], x + d * dv, y + d * du) && d >= best_d) {
      // Later-listed layers win disparity ties (spec lists far to near).
      if (d > best_d || static_cast<int>(i) > owner) owner = static_cast<int>(i);
      best_d = std::max(best_d, d);
    }
  }
  return owner;
}

DisparityMap SyntheticScene::ground_truth_disparity(AngularCoord view) const {
  if (!spec_.grid.contains(view)) throw Error("view outside grid");
  DisparityMap dm;
  dm.target = view;
  dm.map = Image(spec_.width, spec_.height, 1);
  for (int y = 0; y < spec_.height; ++y)
    for (int x = 0; x < spec_.width; ++x)
      dm.map.at(x, y) =
          static_cast<float>(layers_[owner_at(view, x, y)].layer.disparity);
  return dm;
}

Image SyntheticScene::occlusion_mask_analytic(AngularCoord target, AngularCoord source) const {
  if (!spec_.grid.contains(target) || !spec_.grid.contains(source))
    throw Error("view outside grid");
  Image mask(spec_.width, spec_.height, 1);
  // target pixel x appears in the source at x + d*(target - source)
  const double du = target.u - source.u;
  const double dv = target.v - source.v;
  for (int y = 0; y < spec_.height; ++y)
    for (int x = 0; x < spec_.width; ++x) {
      const int owner = owner_at(target, x, y);
      const double d = layers_[owner].layer.disparity;
      const double sx = x + d * dv;
      const double sy = y + d * du;
      if (sx < 0 || sx > spec_.width - 1 || sy < 0 || sy > spec_.height - 1) {
        mask.at(x, y) = 1.0f;
        continue;
      }
      const int source_owner = owner_at(source, sx, sy);
      if (source_owner != owner && layers_[source_owner].layer.disparity > d)
        mask.at(x, y) = 1.0f;
    }
  return mask;
}

SyntheticScene make_synthetic_scene(const SceneSpec& spec, Rng& rng) {
  if (spec.layers.empty()) throw Error("scene needs at least one layer");
  if (spec.layers.front().shape != SceneLayer::Shape::kFull)
    throw Error("layer 0 must be a full-coverage background");
  for (const SceneLayer& l : spec.layers) {
    if (l.disparity < spec.d_min - 1e-9 || l.disparity > spec.d_max + 1e-9)
      throw Error("layer disparity outside configured range");
    if (l.texture_waves < 1 || l.texture_waves > 8)
      throw Error("texture_waves must be in [1, 8]");
  }
  if (spec.channels != 1 && spec.channels != 3) throw Error("channels must be 1 or 3");

  SyntheticScene scene;
  scene.spec_ = spec;
  scene.canon_u_ = 0.5 * (1 + spec.grid.rows);
  scene.canon_v_ = 0.5 * (1 + spec.grid.cols);

  for (const SceneLayer& l : spec.layers) {
    SyntheticScene::LayerData ld;
    ld.layer = l;
    ld.channels = spec.channels;
    const int waves = l.texture_waves;
    for (int c = 0; c < spec.channels; ++c) {
      // Amplitudes sum to 0.45 so 0.5 + texture stays inside [0.05, 0.95].
      double remaining = 0.45;
      for (int i = 0; i < waves; ++i) {
        SyntheticScene::Wave w;
        const double amp = i + 1 == waves ? remaining : remaining * rng.uniform(0.3, 0.7);
        remaining -= amp;
        w.amplitude = amp;
        const double freq = rng.uniform(0.2, 1.0) * spec.max_frequency;
        const double angle = rng.uniform(0.0, 2.0 * std::numbers::pi);
        w.fx = freq * std::cos(angle);
        w.fy = freq * std::sin(angle);
        w.phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
        ld.waves.push_back(w);
      }
    }
    scene.layers_.push_back(std::move(ld));
  }

  scene.lf_ = LightField(spec.grid, spec.width, spec.height, spec.channels);
  for (int u = 1; u <= spec.grid.rows; ++u)
    for (int v = 1; v <= spec.grid.cols; ++v) {
      const AngularCoord q{u, v};
      const double du = u - scene.canon_u_;
      const double dv = v - scene.canon_v_;
      for (int y = 0; y < spec.height; ++y)
        for (int x = 0; x < spec.width; ++x) {
          const int owner = scene.owner_at(q, x, y);
          const double d = scene.layers_[owner].layer.disparity;
          for (int c = 0; c < spec.channels; ++c) {
            const double val =
                scene.texture_at(scene.layers_[owner], c, x + d * dv, y + d * du);
            scene.lf_.at(q, x, y, c) = static_cast<float>(std::clamp(val, 0.0, 1.0));
          }
        }
    }
  return scene;
}

Image occlusion_mask(const DisparityMap& target_disparity, AngularCoord target,
                     AngularCoord source) {
  const Image& d = target_disparity.map;
  for (float v : d.data)
    if (!std::isfinite(v)) throw Error("occlusion_mask: non-finite disparity");
  const int width = d.width, height = d.height;
  Image mask(width, height, 1);
  if (target == source) return mask;  // zero offset: nothing occluded

  const double du = target.u - source.u;
  const double dv = target.v - source.v;

  // Forward z-buffer over the source frame: splat each target pixel's
  // disparity onto the four cells around its projection, keeping the max.
  const float kNone = -std::numeric_limits<float>::infinity();
  Image zbuf(width, height, 1, kNone);
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) {
      const double disp = d.at(x, y);
      const double sx = x + disp * dv;
      const double sy = y + disp * du;
      const int x0 = static_cast<int>(std::floor(sx)), y0 = static_cast<int>(std::floor(sy));
      for (int jy = y0; jy <= y0 + 1; ++jy)
        for (int jx = x0; jx <= x0 + 1; ++jx) {
          if (jx < 0 || jx >= width || jy < 0 || jy >= height) continue;
          if (std::abs(jx - sx) >= 1.0 || std::abs(jy - sy) >= 1.0) continue;
          zbuf.at(jx, jy) = std::max(zbuf.at(jx, jy), static_cast<float>(disp));
        }
    }

  constexpr double kDepthTol = 0.25;  // disparity step treated as the same surface
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) {
      const double disp = d.at(x, y);
      const double sx = x + disp * dv;
      const double sy = y + disp * du;
      if (sx < 0 || sx > width - 1 || sy < 0 || sy > height - 1) {
        mask.at(x, y) = 1.0f;
        continue;
      }
      const int nx = static_cast<int>(std::lround(sx));
      const int ny = static_cast<int>(std::lround(sy));
      if (zbuf.at(nx, ny) > disp + kDepthTol) mask.at(x, y) = 1.0f;
    }
  return mask;
}

SceneSpec simple_scene_spec(AngularGrid grid, int width, int height, int layer_count,
                            double d_lo, double d_hi) {
  if (layer_count < 1) throw Error("need at least one layer");
  SceneSpec spec;
  spec.grid = grid;
  spec.width = width;
  spec.height = height;
  spec.d_min = std::min(d_lo, d_hi);
  spec.d_max = std::max(d_lo, d_hi);

  SceneLayer bg;
  bg.disparity = d_lo;
  bg.shape = SceneLayer::Shape::kFull;
  spec.layers.push_back(bg);
  for (int i = 1; i < layer_count; ++i) {
    SceneLayer l;
    l.disparity = d_lo + (d_hi - d_lo) * static_cast<double>(i) / std::max(1, layer_count - 1);
    if (i % 2 == 1) {
      l.shape = SceneLayer::Shape::kDisk;
      l.cx = width * (0.35 + 0.1 * i);
      l.cy = height * 0.5;
      l.r = 0.18 * std::min(width, height);
    } else {
      l.shape = SceneLayer::Shape::kRect;
      l.x0 = width * 0.15;
      l.y0 = height * (0.15 + 0.05 * i);
      l.x1 = width * 0.45;
      l.y1 = height * (0.45 + 0.05 * i);
    }
    spec.layers.push_back(l);
  }
  return spec;
}

}  // namespace lfkit
