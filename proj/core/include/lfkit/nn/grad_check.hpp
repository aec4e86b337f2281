// Copyright 2026 The lfkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <map>

#include "lfkit/nn/optim.hpp"

namespace lfkit::nn {

struct LossEval {
  double value = 0.0;
  std::map<std::string, Tensor> grads;
};

// Central finite differences against reverse-mode gradients. Returns the max
// over parameter coordinates of |g_ad - g_fd| / max(|g_ad|, |g_fd|, 1e-8).
// The callable must be a pure function of the store contents.
double grad_check(const std::function<LossEval(ParamStore&)>& f, ParamStore& params,
                  double delta = 1e-4);

// Same, with a cheaper value-only callable for the finite-difference probes.
double grad_check(const std::function<LossEval(ParamStore&)>& f,
                  const std::function<double(ParamStore&)>& value_f, ParamStore& params,
                  double delta = 1e-4);

}  // namespace lfkit::nn
