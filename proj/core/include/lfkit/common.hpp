// Copyright 2026 The lfkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace lfkit {

// Compute scalar for the network stack. Double by default; float when built
// with LFKIT_SINGLE_PRECISION for throughput.
#ifdef LFKIT_SINGLE_PRECISION
using real = float;
#else
using real = double;
#endif

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace lfkit
