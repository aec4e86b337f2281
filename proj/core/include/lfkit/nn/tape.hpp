// Copyright 2026 The lfkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <vector>

#include "lfkit/image.hpp"
#include "lfkit/nn/tensor.hpp"

namespace lfkit::nn {

enum class Act { kIdentity, kRelu, kLeakyRelu, kTanh, kSoftplus };

// Reverse-mode autodiff over eagerly evaluated ops. Nodes are appended in
// topological order; backward() walks them in reverse. Values live until
// clear(), so a tape is built per training step and then discarded.
class Tape {
 public:
  using NodeId = int;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  NodeId constant(Tensor t) { return push(std::move(t), false, {}); }
  NodeId leaf(Tensor t) { return push(std::move(t), true, {}); }

  const Tensor& value(NodeId id) const { return nodes_[id].value; }
  const Tensor& grad(NodeId id) const { return nodes_[id].grad; }
  bool needs_grad(NodeId id) const { return nodes_[id].needs_grad; }
  int size() const { return static_cast<int>(nodes_.size()); }
  void clear() { nodes_.clear(); }

  // --- elementwise ---
  NodeId add(NodeId a, NodeId b);
  NodeId sub(NodeId a, NodeId b);
  NodeId mul(NodeId a, NodeId b);
  NodeId add_many(const std::vector<NodeId>& xs);
  // scale * x + shift
  NodeId affine(NodeId x, real scale, real shift);
  NodeId activation(NodeId x, Act kind, real alpha = real(0.1));

  // --- shape ---
  NodeId reshape(NodeId x, std::vector<int> new_shape);
  NodeId concat_channels(const std::vector<NodeId>& xs);         // [B,Ci,H,W] -> [B,sum Ci,H,W]
  NodeId slice_channels(NodeId x, int c0, int c1);               // channels [c0, c1)
  NodeId slice_batch(NodeId x, int b0, int b1);                  // batch [b0, b1)
  // Batch slots are either graph nodes of shape [1,C,H,W] (non-null) or
  // constant [1,C,H,W] tensors; gradients flow only into node slots.
  NodeId stack_batch(const std::vector<NodeId>& slots, const std::vector<Tensor>& constants,
                     const std::vector<int>& use_node);

  // Views-major (M*N, C, H, W) <-> pixels-major (W*H, C, M, N).
  NodeId relayout_to_angular(NodeId x, int m, int n, int height, int width);
  NodeId relayout_to_spatial(NodeId x, int m, int n, int height, int width);

  // --- network layers ---
  // x [B,Cin,H,W], w [Cout,Cin,kh,kw] (odd kernels), b [Cout];
  // cross-correlation with zero "same" padding.
  NodeId conv2d(NodeId x, NodeId w, NodeId b);
  // Per-pixel softmax over the channel axis of [B,K,H,W].
  NodeId channel_softmax(NodeId x);

  // --- geometry ---
  // out(y,x) = src(x + dv*d(y,x), y + du*d(y,x)), bilinear with clamped
  // borders; src is a constant image, disparity a [1,1,H,W] node.
  NodeId warp_image(const Image& src, NodeId disparity, double du, double dv);

  // --- reductions (scalar results) ---
  // sum |a - b|; subgradient of |.| is 0 at 0.
  NodeId l1_to_constant(NodeId a, const Tensor& b);
  // Same, with one weight per batch entry of [B,C,H,W].
  NodeId l1_to_constant_masked(NodeId a, const Tensor& b, const std::vector<real>& batch_weight);
  // L1 norms of all four second differences of a [1,1,H,W] map, valid
  // stencil sites only; the two mixed terms coincide and are both counted.
  NodeId second_order_smoothness(NodeId disparity);
  NodeId scale(NodeId x, real s);
  NodeId add_scalars(const std::vector<NodeId>& xs) { return add_many(xs); }

  // Seeds d(root)/d(root) = 1 and accumulates gradients into every
  // needs-grad node reachable from it. root must be scalar.
  void backward(NodeId root);

 private:
  struct Node {
    Tensor value;
    Tensor grad;
    bool needs_grad = false;
    std::function<void(Tape&)> back;
  };

  NodeId push(Tensor value, bool needs_grad, std::function<void(Tape&)> back) {
    nodes_.push_back(Node{std::move(value), Tensor{}, needs_grad, std::move(back)});
    return static_cast<NodeId>(nodes_.size() - 1);
  }
  Tensor& grad_buffer(NodeId id) {
    Node& n = nodes_[id];
    if (n.grad.v.empty()) n.grad = Tensor(n.value.shape);
    return n.grad;
  }

  std::vector<Node> nodes_;
};

// Intermediate features of the pseudo-4D alternation, tagged with their
// physical layout: spatial = views-major (M*N, C, H, W), angular =
// pixels-major (W*H, C, M, N).
enum class StackLayout { kSpatial, kAngular };

struct FeatureStack {
  Tape::NodeId node = -1;
  StackLayout layout = StackLayout::kSpatial;
  int rows = 0;     // M
  int cols = 0;     // N
  int height = 0;   // H
  int width = 0;    // W
  int channels = 0;
};

// Flips between the two layouts; element-preserving, gradient through the
// inverse permutation.
FeatureStack relayout(Tape& tape, const FeatureStack& f);

}  // namespace lfkit::nn
