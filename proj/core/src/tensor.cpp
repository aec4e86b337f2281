// Copyright 2026 The lfkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "lfkit/nn/tensor.hpp"

#include <cmath>

namespace lfkit::nn {

std::string Tensor::shape_str() const {
  std::string s = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(shape[i]);
  }
  return s + "]";
}

Tensor tensor_from_image(const Image& img) {
  if (img.channels != 1) throw Error("tensor_from_image expects a single channel");
  Tensor t({1, 1, img.height, img.width});
  for (std::size_t i = 0; i < img.data.size(); ++i) t.v[i] = static_cast<real>(img.data[i]);
  return t;
}

Image image_from_tensor(const Tensor& t) {
  if (t.rank() != 4 || t.dim(0) != 1 || t.dim(1) != 1)
    throw Error("image_from_tensor expects shape [1,1,H,W], got " + t.shape_str());
  Image img(t.dim(3), t.dim(2), 1);
  for (std::size_t i = 0; i < img.data.size(); ++i) img.data[i] = static_cast<float>(t.v[i]);
  return img;
}

bool all_finite(const Tensor& t) {
  for (real x : t.v)
    if (!std::isfinite(x)) return false;
  return true;
}

}  // namespace lfkit::nn
