// Copyright 2026 The lfkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "lfkit/loss.hpp"

#include <cmath>

namespace lfkit::loss {

double l1_loss(const Image& a, const Image& b) {
  if (!a.same_shape(b)) throw Error("l1_loss: shape mismatch");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.data.size(); ++i)
    sum += std::abs(static_cast<double>(a.data[i]) - static_cast<double>(b.data[i]));
  return sum;
}

double l1_loss(const LightField& a, const LightField& b) {
  if (!(a.grid() == b.grid()) || a.width() != b.width() || a.height() != b.height() ||
      a.channels() != b.channels())
    throw Error("l1_loss: light field shape mismatch");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i)
    sum += std::abs(static_cast<double>(a.data()[i]) - static_cast<double>(b.data()[i]));
  return sum;
}

double second_order_smoothness(const std::vector<DisparityMap>& maps) {
  if (maps.empty()) throw Error("second_order_smoothness: no maps");
  double total = 0.0;
  for (const DisparityMap& dm : maps) {
    const Image& d = dm.map;
    if (d.width < 3 || d.height < 3) throw Error("second_order_smoothness: map smaller than 3x3");
    for (int y = 0; y < d.height; ++y)
      for (int x = 1; x + 1 < d.width; ++x)
        total += std::abs(static_cast<double>(d.at(x + 1, y)) - 2.0 * d.at(x, y) + d.at(x - 1, y));
    for (int y = 1; y + 1 < d.height; ++y)
      for (int x = 0; x < d.width; ++x)
        total += std::abs(static_cast<double>(d.at(x, y + 1)) - 2.0 * d.at(x, y) + d.at(x, y - 1));
    for (int y = 0; y + 1 < d.height; ++y)
      for (int x = 0; x + 1 < d.width; ++x)
        total += 2.0 * std::abs(static_cast<double>(d.at(x + 1, y + 1)) - d.at(x, y + 1) -
                                d.at(x + 1, y) + d.at(x, y));
  }
  return total;
}

double total_loss_value(const LightField& gt, const CoarseOutput& coarse,
                        const LightField& refined, const LossWeights& w) {
  double ls = 0.0, lr = 0.0;
  for (const AngularCoord& q : coarse.targets.coords) {
    ls += l1_loss(gt.view(q), coarse.intermediate.view(q));
    lr += l1_loss(gt.view(q), refined.view(q));
  }
  const double lsmooth =
      coarse.disparities.empty() ? 0.0 : second_order_smoothness(coarse.disparities);
  return w.lambda1 * ls + w.lambda2 * lsmooth + w.lambda3 * lr;
}

TotalLossNodes total_loss_nodes(nn::Tape& tape, const LightField& gt,
                                const model::CoarseNodes& coarse,
                                nn::Tape::NodeId refined_stack, const LossWeights& w,
                                bool normalize) {
  if (gt.channels() != 1) throw Error("loss graph expects single-channel ground truth");
  const AngularGrid& grid = gt.grid();
  const int targets = coarse.targets.size();
  if (targets == 0) throw Error("loss graph needs at least one target");

  // intermediate term: synthesized views vs ground truth
  std::vector<nn::Tape::NodeId> ls_parts;
  for (int t = 0; t < targets; ++t) {
    const AngularCoord q = coarse.targets.coords[t];
    ls_parts.push_back(tape.l1_to_constant(coarse.per_target[t].image,
                                           nn::tensor_from_image(gt.view(q))));
  }
  nn::Tape::NodeId ls = tape.add_many(ls_parts);

  // smoothness over the predicted disparity maps
  std::vector<nn::Tape::NodeId> sm_parts;
  for (int t = 0; t < targets; ++t)
    sm_parts.push_back(tape.second_order_smoothness(coarse.per_target[t].estimate.disparity));
  nn::Tape::NodeId lsmooth = tape.add_many(sm_parts);

  // refined term: synthesized batch entries of the refined stack
  nn::Tensor gt_stack({grid.cells(), 1, gt.height(), gt.width()});
  std::vector<real> weights(static_cast<std::size_t>(grid.cells()), real(0));
  const std::int64_t stride = static_cast<std::int64_t>(gt.height()) * gt.width();
  for (int i = 0; i < grid.cells(); ++i) {
    const Image view = gt.view(grid.coord(i));
    for (std::int64_t j = 0; j < stride; ++j)
      gt_stack.v[i * stride + j] = static_cast<real>(view.data[static_cast<std::size_t>(j)]);
  }
  for (const AngularCoord& q : coarse.targets.coords)
    weights[static_cast<std::size_t>(grid.index(q))] = real(1);
  nn::Tape::NodeId lr = tape.l1_to_constant_masked(refined_stack, gt_stack, weights);

  double ls_scale = w.lambda1, sm_scale = w.lambda2, lr_scale = w.lambda3;
  if (normalize) {
    const double pixels = static_cast<double>(targets) * gt.height() * gt.width();
    ls_scale /= pixels;
    lr_scale /= pixels;
    sm_scale /= pixels;
  }
  TotalLossNodes out;
  out.intermediate_term = ls;
  out.smoothness_term = lsmooth;
  out.refined_term = lr;
  out.total = tape.add_many({tape.scale(ls, static_cast<real>(ls_scale)),
                             tape.scale(lsmooth, static_cast<real>(sm_scale)),
                             tape.scale(lr, static_cast<real>(lr_scale))});
  return out;
}

}  // namespace lfkit::loss
