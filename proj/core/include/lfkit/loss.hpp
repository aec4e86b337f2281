// Copyright 2026 The lfkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "lfkit/model.hpp"

namespace lfkit::loss {

struct LossWeights {
  double lambda1 = 1.0;    // intermediate reconstruction
  double lambda2 = 0.001;  // disparity smoothness
  double lambda3 = 1.0;    // refined reconstruction
};

// Unnormalized sums of absolute differences. Normalization is the trainer's
// concern; the raw sums stay available for tests.
double l1_loss(const Image& a, const Image& b);
double l1_loss(const LightField& a, const LightField& b);

// Sum over maps of the L1 norms of all four second differences, valid
// stencil sites only (the two mixed terms coincide and are both counted).
double second_order_smoothness(const std::vector<DisparityMap>& maps);

// lambda1 * l1(gt, intermediate) + lambda2 * smoothness + lambda3 *
// l1(gt, refined). The l1 terms run over synthesized views only (copied
// input views are identical by construction).
double total_loss_value(const LightField& gt, const CoarseOutput& coarse,
                        const LightField& refined, const LossWeights& w);

// Differentiable total loss over a built coarse/refine graph. The gt stack
// is [M*N,1,H,W] in row-major view order. When `normalize` is set, each term
// is divided by its element count (per-element losses for training).
struct TotalLossNodes {
  nn::Tape::NodeId total;
  nn::Tape::NodeId intermediate_term;
  nn::Tape::NodeId smoothness_term;
  nn::Tape::NodeId refined_term;
};
TotalLossNodes total_loss_nodes(nn::Tape& tape, const LightField& gt,
                                const model::CoarseNodes& coarse,
                                nn::Tape::NodeId refined_stack, const LossWeights& w,
                                bool normalize);

}  // namespace lfkit::loss
