// Copyright 2026 The lfkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <vector>

#include "lfkit/image.hpp"
#include "lfkit/light_field.hpp"

namespace lfkit {

// Scalar disparity field predicted (or known) at a target angular position.
// Convention: warping samples the source at x + (q - p) * d, so scene content
// moves by -d pixels per +1 angular step; u-steps act on y, v-steps on x.
struct DisparityMap {
  AngularCoord target;
  Image map;  // single channel

  int width() const { return map.width; }
  int height() const { return map.height; }
  // Throws on non-finite values or |value| > d_max.
  void validate(double d_max) const;
};

// K per-pixel blending weights for a target view. A valid set is a convex
// combination: per-pixel sum over the K maps equals 1 (within 1e-6).
struct ConfidenceMaps {
  AngularCoord target;
  std::vector<Image> maps;

  int count() const { return static_cast<int>(maps.size()); }
  void validate() const;
};

// Stack of K input views warped to a target position under L constant
// disparity planes. slabs[k][l] is input k warped with plane l.
struct PlaneSweepVolume {
  AngularCoord target;
  std::vector<double> planes;
  std::vector<std::vector<Image>> slabs;

  int view_count() const { return static_cast<int>(slabs.size()); }
  int plane_count() const { return static_cast<int>(planes.size()); }
};

namespace detail {

// Bilinear fetch with clamp-to-edge, shared between the float pipeline and
// the double-precision network ops. Coordinates are clamped to
// [0, W-1] x [0, H-1] before interpolation.
template <typename T, typename Src>
inline T bilinear_fetch(const Src* src, int width, int height, T x, T y) {
  const T xmax = static_cast<T>(width - 1);
  const T ymax = static_cast<T>(height - 1);
  x = x < T(0) ? T(0) : (x > xmax ? xmax : x);
  y = y < T(0) ? T(0) : (y > ymax ? ymax : y);
  const int x0 = static_cast<int>(x);
  const int y0 = static_cast<int>(y);
  const int x1 = x0 + 1 < width ? x0 + 1 : x0;
  const int y1 = y0 + 1 < height ? y0 + 1 : y0;
  const T fx = x - static_cast<T>(x0);
  const T fy = y - static_cast<T>(y0);
  const T a = static_cast<T>(src[y0 * width + x0]);
  const T b = static_cast<T>(src[y0 * width + x1]);
  const T c = static_cast<T>(src[y1 * width + x0]);
  const T d = static_cast<T>(src[y1 * width + x1]);
  return (T(1) - fy) * ((T(1) - fx) * a + fx * b) + fy * ((T(1) - fx) * c + fx * d);
}

// d(bilinear_fetch)/d(x,y) at the same clamped coordinates. Zero outside the
// image (clamped region), piecewise constant inside a cell.
template <typename T, typename Src>
inline void bilinear_fetch_grad(const Src* src, int width, int height, T x, T y, T* dx, T* dy) {
  const T xmax = static_cast<T>(width - 1);
  const T ymax = static_cast<T>(height - 1);
  const bool x_inside = x > T(0) && x < xmax;
  const bool y_inside = y > T(0) && y < ymax;
  x = x < T(0) ? T(0) : (x > xmax ? xmax : x);
  y = y < T(0) ? T(0) : (y > ymax ? ymax : y);
  const int x0 = static_cast<int>(x);
  const int y0 = static_cast<int>(y);
  const int x1 = x0 + 1 < width ? x0 + 1 : x0;
  const int y1 = y0 + 1 < height ? y0 + 1 : y0;
  const T fx = x - static_cast<T>(x0);
  const T fy = y - static_cast<T>(y0);
  const T a = static_cast<T>(src[y0 * width + x0]);
  const T b = static_cast<T>(src[y0 * width + x1]);
  const T c = static_cast<T>(src[y1 * width + x0]);
  const T d = static_cast<T>(src[y1 * width + x1]);
  *dx = x_inside ? (T(1) - fy) * (b - a) + fy * (d - c) : T(0);
  *dy = y_inside ? (T(1) - fx) * (c - a) + fx * (d - b) : T(0);
}

}  // namespace detail

// Bilinear interpolation of a single-channel image with clamp-to-edge
// borders. Throws on non-finite coordinates or an empty image.
double bilinear_sample(const Image& img, double x, double y);

// out(x, y) = src(x + dv * D(x, y), y + du * D(x, y)) where (du, dv) =
// (q.u - p.u, q.v - p.v). Synthesizes the view at q from the view at p.
Image backward_warp(const Image& src, AngularCoord src_pos, AngularCoord tgt_pos,
                    const DisparityMap& disp);

// Warp under a constant disparity (one plane-sweep slab).
Image warp_constant_disparity(const Image& src, AngularCoord src_pos, AngularCoord tgt_pos,
                              double disparity);

// Builds the K x L plane-sweep volume for a target position. Planes must be
// strictly increasing with L >= 2; the target must not collide with an input.
PlaneSweepVolume build_psv(const std::vector<Image>& sparse_views,
                           const SamplingPattern& pattern, AngularCoord target,
                           const std::vector<double>& planes);

// Uniformly spaced disparity planes over [d_min, d_max].
std::vector<double> uniform_planes(int count, double d_min, double d_max);

// out = sum_k conf.maps[k] * warped[k], element-wise.
Image blend_confidence(const std::vector<Image>& warped, const ConfidenceMaps& conf);

}  // namespace lfkit
