// Copyright 2026 The lfkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "lfkit/nn/grad_check.hpp"

#include <cmath>

namespace lfkit::nn {

double grad_check(const std::function<LossEval(ParamStore&)>& f,
                  const std::function<double(ParamStore&)>& value_f, ParamStore& params,
                  double delta) {
  const LossEval center = f(params);
  if (!std::isfinite(center.value)) throw Error("grad_check: non-finite loss");

  double max_rel = 0.0;
  for (auto& [name, entry] : params.entries()) {
    auto git = center.grads.find(name);
    if (git == center.grads.end()) throw Error("grad_check: no gradient for '" + name + "'");
    const Tensor& g_ad = git->second;
    if (!g_ad.same_shape(entry.value)) throw Error("grad_check: gradient shape mismatch");
    for (std::int64_t i = 0; i < entry.value.numel(); ++i) {
      const real saved = entry.value.v[i];
      entry.value.v[i] = saved + static_cast<real>(delta);
      const double up = value_f(params);
      entry.value.v[i] = saved - static_cast<real>(delta);
      const double down = value_f(params);
      entry.value.v[i] = saved;
      if (!std::isfinite(up) || !std::isfinite(down))
        throw Error("grad_check: non-finite loss under perturbation");
      const double g_fd = (up - down) / (2.0 * delta);
      const double g = static_cast<double>(g_ad.v[i]);
      const double rel = std::abs(g - g_fd) / std::max({std::abs(g), std::abs(g_fd), 1e-8});
      max_rel = std::max(max_rel, rel);
    }
  }
  return max_rel;
}

double grad_check(const std::function<LossEval(ParamStore&)>& f, ParamStore& params,
                  double delta) {
  return grad_check(f, [&f](ParamStore& p) { return f(p).value; }, params, delta);
}

}  // namespace lfkit::nn
