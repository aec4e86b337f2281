// Copyright 2026 The lfkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "lfkit/image.hpp"

namespace lfkit {

// Angular position on the sampling grid, 1-based: 1 <= u <= M rows,
// 1 <= v <= N cols. Internal arrays are 0-based; conversion happens here.
struct AngularCoord {
  int u = 1;
  int v = 1;

  friend bool operator==(const AngularCoord& a, const AngularCoord& b) {
    return a.u == b.u && a.v == b.v;
  }
  friend bool operator!=(const AngularCoord& a, const AngularCoord& b) { return !(a == b); }
  friend bool operator<(const AngularCoord& a, const AngularCoord& b) {
    return a.u != b.u ? a.u < b.u : a.v < b.v;
  }
};

struct AngularGrid {
  int rows = 1;  // M
  int cols = 1;  // N

  int cells() const { return rows * cols; }
  bool contains(AngularCoord c) const {
    return c.u >= 1 && c.u <= rows && c.v >= 1 && c.v <= cols;
  }
  // Row-major cell index of a 1-based coordinate.
  int index(AngularCoord c) const { return (c.u - 1) * cols + (c.v - 1); }
  AngularCoord coord(int index) const { return {index / cols + 1, index % cols + 1}; }

  friend bool operator==(const AngularGrid& a, const AngularGrid& b) {
    return a.rows == b.rows && a.cols == b.cols;
  }
};

// Set of K distinct sampled angular positions.
struct SamplingPattern {
  std::vector<AngularCoord> coords;

  int size() const { return static_cast<int>(coords.size()); }
  bool contains(AngularCoord c) const {
    for (const auto& p : coords)
      if (p == c) return true;
    return false;
  }
  // Throws if empty, out of grid, or duplicated.
  void validate(const AngularGrid& grid) const;
};

// Novel positions Q, disjoint from the pattern that produced it.
struct TargetSet {
  std::vector<AngularCoord> coords;
  int size() const { return static_cast<int>(coords.size()); }
};

// 4-D light field: M x N views of H x W x C samples in [0, 1].
class LightField {
 public:
  LightField() = default;
  LightField(AngularGrid grid, int width, int height, int channels);

  const AngularGrid& grid() const { return grid_; }
  int width() const { return width_; }
  int height() const { return height_; }
  int channels() const { return channels_; }

  float& at(AngularCoord c, int x, int y, int ch = 0) {
    return data_[sample_index(c, x, y, ch)];
  }
  float at(AngularCoord c, int x, int y, int ch = 0) const {
    return data_[sample_index(c, x, y, ch)];
  }

  Image view(AngularCoord c) const;
  void set_view(AngularCoord c, const Image& img);

  std::vector<float>& data() { return data_; }
  const std::vector<float>& data() const { return data_; }

  std::size_t view_offset(AngularCoord c) const {
    return static_cast<std::size_t>(grid_.index(c)) * view_stride();
  }
  std::size_t view_stride() const {
    return static_cast<std::size_t>(width_) * height_ * channels_;
  }

 private:
  std::size_t sample_index(AngularCoord c, int x, int y, int ch) const {
    return view_offset(c) + (static_cast<std::size_t>(y) * width_ + x) * channels_ + ch;
  }

  AngularGrid grid_;
  int width_ = 0, height_ = 0, channels_ = 0;
  std::vector<float> data_;
};

enum class EpiOrientation { kHorizontal, kVertical };

// 2-D light-field slice with one angular and one spatial axis.
struct Epi {
  Image image;  // horizontal: N x W (rows = v); vertical: M x H (rows = u)
  EpiOrientation orientation = EpiOrientation::kHorizontal;
  int fixed_angular = 1;  // u0 for horizontal, v0 for vertical (1-based)
  int fixed_spatial = 0;  // y0 for horizontal, x0 for vertical (0-based)
};

// Q = U \ P in row-major order.
TargetSet complement_pattern(const AngularGrid& grid, const SamplingPattern& pattern);

Epi extract_epi(const LightField& lf, EpiOrientation orientation, int fixed_angular,
                int fixed_spatial);

// ITU-R BT.601 luma of an RGB light field.
LightField to_luma(const LightField& lf);
Image to_luma(const Image& rgb);

// Parses "u,v;u,v;..." (1-based).
SamplingPattern parse_pattern(const std::string& text);
std::string format_pattern(const SamplingPattern& pattern);

}  // namespace lfkit
