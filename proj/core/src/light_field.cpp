// Copyright 2026 The lfkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "lfkit/light_field.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <set>
#include <sstream>

namespace lfkit {

void SamplingPattern::validate(const AngularGrid& grid) const {
  if (coords.empty()) throw Error("sampling pattern is empty");
  std::set<std::pair<int, int>> seen;
  for (const auto& c : coords) {
    if (!grid.contains(c)) {
      throw Error("pattern coord (" + std::to_string(c.u) + "," + std::to_string(c.v) +
                  ") outside " + std::to_string(grid.rows) + "x" + std::to_string(grid.cols) +
                  " grid");
    }
    if (!seen.insert({c.u, c.v}).second) {
      throw Error("duplicate pattern coord (" + std::to_string(c.u) + "," +
                  std::to_string(c.v) + ")");
    }
  }
}

LightField::LightField(AngularGrid grid, int width, int height, int channels)
    : grid_(grid), width_(width), height_(height), channels_(channels) {
  if (grid.rows < 1 || grid.cols < 1) throw Error("angular grid must be at least 1x1");
  if (width < 1 || height < 1) throw Error("spatial size must be positive");
  if (channels != 1 && channels != 3) throw Error("channels must be 1 or 3");
  data_.assign(static_cast<std::size_t>(grid.cells()) * view_stride(), 0.0f);
}

Image LightField::view(AngularCoord c) const {
  if (!grid_.contains(c)) throw Error("view coord outside grid");
  Image img(width_, height_, channels_);
  std::memcpy(img.data.data(), data_.data() + view_offset(c), view_stride() * sizeof(float));
  return img;
}

void LightField::set_view(AngularCoord c, const Image& img) {
  if (!grid_.contains(c)) throw Error("view coord outside grid");
  if (img.width != width_ || img.height != height_ || img.channels != channels_)
    throw Error("view shape mismatch");
  std::memcpy(data_.data() + view_offset(c), img.data.data(), view_stride() * sizeof(float));
}

TargetSet complement_pattern(const AngularGrid& grid, const SamplingPattern& pattern) {
  pattern.validate(grid);
  TargetSet out;
  out.coords.reserve(grid.cells() - pattern.size());
  for (int u = 1; u <= grid.rows; ++u)
    for (int v = 1; v <= grid.cols; ++v)
      if (!pattern.contains({u, v})) out.coords.push_back({u, v});
  return out;
}

Epi extract_epi(const LightField& lf, EpiOrientation orientation, int fixed_angular,
                int fixed_spatial) {
  Epi epi;
  epi.orientation = orientation;
  epi.fixed_angular = fixed_angular;
  epi.fixed_spatial = fixed_spatial;
  const AngularGrid& g = lf.grid();
  if (orientation == EpiOrientation::kHorizontal) {
    if (fixed_angular < 1 || fixed_angular > g.rows) throw Error("EPI u index out of range");
    if (fixed_spatial < 0 || fixed_spatial >= lf.height()) throw Error("EPI y index out of range");
    epi.image = Image(lf.width(), g.cols, lf.channels());
    for (int v = 1; v <= g.cols; ++v)
      for (int x = 0; x < lf.width(); ++x)
        for (int c = 0; c < lf.channels(); ++c)
          epi.image.at(x, v - 1, c) = lf.at({fixed_angular, v}, x, fixed_spatial, c);
  } else {
    if (fixed_angular < 1 || fixed_angular > g.cols) throw Error("EPI v index out of range");
    if (fixed_spatial < 0 || fixed_spatial >= lf.width()) throw Error("EPI x index out of range");
    epi.image = Image(lf.height(), g.rows, lf.channels());
    for (int u = 1; u <= g.rows; ++u)
      for (int y = 0; y < lf.height(); ++y)
        for (int c = 0; c < lf.channels(); ++c)
          epi.image.at(y, u - 1, c) = lf.at({u, fixed_angular}, fixed_spatial, y, c);
  }
  return epi;
}

Image to_luma(const Image& rgb) {
  if (rgb.channels != 3) throw Error("to_luma expects 3 channels");
  Image out(rgb.width, rgb.height, 1);
  for (int y = 0; y < rgb.height; ++y)
    for (int x = 0; x < rgb.width; ++x)
      out.at(x, y) = 0.299f * rgb.at(x, y, 0) + 0.587f * rgb.at(x, y, 1) +
                     0.114f * rgb.at(x, y, 2);
  return out;
}

LightField to_luma(const LightField& lf) {
  if (lf.channels() != 3) throw Error("to_luma expects 3 channels");
  LightField out(lf.grid(), lf.width(), lf.height(), 1);
  for (int u = 1; u <= lf.grid().rows; ++u)
    for (int v = 1; v <= lf.grid().cols; ++v)
      out.set_view({u, v}, to_luma(lf.view({u, v})));
  return out;
}

SamplingPattern parse_pattern(const std::string& text) {
  SamplingPattern pattern;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ';')) {
    if (item.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    int u = 0, v = 0;
    char comma = 0;
    std::stringstream pair(item);
    if (!(pair >> u >> comma >> v) || comma != ',')
      throw Error("bad pattern entry '" + item + "' (expected u,v)");
    pattern.coords.push_back({u, v});
  }
  if (pattern.coords.empty()) throw Error("empty pattern string");
  return pattern;
}

std::string format_pattern(const SamplingPattern& pattern) {
  std::string out;
  for (std::size_t i = 0; i < pattern.coords.size(); ++i) {
    if (i) out += ';';
    out += std::to_string(pattern.coords[i].u) + "," + std::to_string(pattern.coords[i].v);
  }
  return out;
}

}  // namespace lfkit
