// Copyright 2026 The lfkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "lfkit/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace lfkit {

void DisparityMap::validate(double d_max) const {
  for (float v : map.data) {
    if (!std::isfinite(v)) throw Error("disparity map contains non-finite value");
    if (std::abs(v) > d_max + 1e-9)
      throw Error("disparity " + std::to_string(v) + " exceeds bound " + std::to_string(d_max));
  }
}

void ConfidenceMaps::validate() const {
  if (maps.empty()) throw Error("confidence maps empty");
  const Image& first = maps.front();
  for (const Image& m : maps)
    if (!m.same_shape(first)) throw Error("confidence map shape mismatch");
  for (int y = 0; y < first.height; ++y)
    for (int x = 0; x < first.width; ++x) {
      double sum = 0.0;
      for (const Image& m : maps) sum += m.at(x, y);
      if (std::abs(sum - 1.0) > 1e-6)
        throw Error("confidence maps do not sum to 1 at (" + std::to_string(x) + "," +
                    std::to_string(y) + ")");
    }
}

double bilinear_sample(const Image& img, double x, double y) {
  if (img.empty()) throw Error("bilinear_sample on empty image");
  if (img.channels != 1) throw Error("bilinear_sample expects a single channel");
  if (!std::isfinite(x) || !std::isfinite(y)) throw Error("non-finite sample coordinates");
  return detail::bilinear_fetch<double>(img.data.data(), img.width, img.height, x, y);
}

Image backward_warp(const Image& src, AngularCoord src_pos, AngularCoord tgt_pos,
                    const DisparityMap& disp) {
  if (src.channels != 1) throw Error("backward_warp expects single-channel images");
  if (disp.map.width != src.width || disp.map.height != src.height)
    throw Error("disparity dimensions do not match source");
  const double du = static_cast<double>(tgt_pos.u - src_pos.u);
  const double dv = static_cast<double>(tgt_pos.v - src_pos.v);
  Image out(src.width, src.height, 1);
  for (int y = 0; y < src.height; ++y)
    for (int x = 0; x < src.width; ++x) {
      const double d = disp.map.at(x, y);
      out.at(x, y) = static_cast<float>(detail::bilinear_fetch<double>(
          src.data.data(), src.width, src.height, x + dv * d, y + du * d));
    }
  return out;
}

Image warp_constant_disparity(const Image& src, AngularCoord src_pos, AngularCoord tgt_pos,
                              double disparity) {
  DisparityMap disp;
  disp.target = tgt_pos;
  disp.map = Image(src.width, src.height, 1, static_cast<float>(disparity));
  return backward_warp(src, src_pos, tgt_pos, disp);
}

PlaneSweepVolume build_psv(const std::vector<Image>& sparse_views,
                           const SamplingPattern& pattern, AngularCoord target,
                           const std::vector<double>& planes) {
  if (sparse_views.size() != pattern.coords.size())
    throw Error("view count does not match pattern");
  if (pattern.contains(target)) throw Error("PSV target collides with an input position");
  if (planes.size() < 2) throw Error("need at least two disparity planes");
  for (std::size_t i = 1; i < planes.size(); ++i)
    if (!(planes[i] > planes[i - 1])) throw Error("disparity planes must be strictly increasing");

  PlaneSweepVolume psv;
  psv.target = target;
  psv.planes = planes;
  psv.slabs.resize(sparse_views.size());
  for (std::size_t k = 0; k < sparse_views.size(); ++k) {
    psv.slabs[k].reserve(planes.size());
    for (double d : planes)
      psv.slabs[k].push_back(
          warp_constant_disparity(sparse_views[k], pattern.coords[k], target, d));
  }
  return psv;
}

std::vector<double> uniform_planes(int count, double d_min, double d_max) {
  if (count < 2) throw Error("need at least two disparity planes");
  if (!(d_max > d_min)) throw Error("d_max must exceed d_min");
  std::vector<double> planes(count);
  for (int i = 0; i < count; ++i)
    planes[i] = d_min + (d_max - d_min) * static_cast<double>(i) / (count - 1);
  return planes;
}

Image blend_confidence(const std::vector<Image>& warped, const ConfidenceMaps& conf) {
  if (warped.empty()) throw Error("no images to blend");
  if (static_cast<int>(warped.size()) != conf.count())
    throw Error("confidence map count does not match image count");
  const Image& first = warped.front();
  for (const Image& w : warped)
    if (!w.same_shape(first)) throw Error("blend input shape mismatch");
  for (const Image& m : conf.maps)
    if (m.width != first.width || m.height != first.height)
      throw Error("confidence map shape mismatch");

  Image out(first.width, first.height, first.channels);
  for (std::size_t k = 0; k < warped.size(); ++k)
    for (int y = 0; y < first.height; ++y)
      for (int x = 0; x < first.width; ++x)
        for (int c = 0; c < first.channels; ++c)
          out.at(x, y, c) += conf.maps[k].at(x, y) * warped[k].at(x, y, c);
  return out;
}

}  // namespace lfkit
