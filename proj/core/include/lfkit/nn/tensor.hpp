// Copyright 2026 The lfkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <initializer_list>
#include <string>
#include <vector>

#include "lfkit/common.hpp"
#include "lfkit/image.hpp"

namespace lfkit::nn {

// Dense row-major N-d array of `real`.
struct Tensor {
  std::vector<int> shape;
  std::vector<real> v;

  Tensor() = default;
  explicit Tensor(std::vector<int> s) : shape(std::move(s)) {
    v.assign(static_cast<std::size_t>(numel_of(shape)), real(0));
  }
  Tensor(std::vector<int> s, std::vector<real> data) : shape(std::move(s)), v(std::move(data)) {
    if (static_cast<std::int64_t>(v.size()) != numel_of(shape))
      throw Error("tensor data does not match shape");
  }

  static std::int64_t numel_of(const std::vector<int>& s) {
    std::int64_t n = 1;
    for (int d : s) {
      if (d < 0) throw Error("negative tensor extent");
      n *= d;
    }
    return n;
  }

  std::int64_t numel() const { return static_cast<std::int64_t>(v.size()); }
  int dim(int i) const { return shape[static_cast<std::size_t>(i)]; }
  int rank() const { return static_cast<int>(shape.size()); }

  bool same_shape(const Tensor& o) const { return shape == o.shape; }
  std::string shape_str() const;

  real* data() { return v.data(); }
  const real* data() const { return v.data(); }

  void fill(real x) { std::fill(v.begin(), v.end(), x); }

  // Scalar convenience for loss nodes.
  real scalar() const {
    if (numel() != 1) throw Error("tensor is not a scalar");
    return v[0];
  }
};

// Single-channel float image -> [1, 1, H, W] tensor and back.
Tensor tensor_from_image(const Image& img);
Image image_from_tensor(const Tensor& t);

bool all_finite(const Tensor& t);

}  // namespace lfkit::nn
