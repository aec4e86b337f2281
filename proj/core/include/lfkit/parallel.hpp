// Copyright 2026 The lfkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>

namespace lfkit {

// Number of worker threads used by parallel_for. Defaults to the hardware
// concurrency, overridable via set_thread_count or the LFKIT_THREADS
// environment variable (read once at startup).
int thread_count();
void set_thread_count(int n);

// Runs fn(begin, end) over a static split of [0, n). Each range is touched by
// exactly one thread, so results are bit-identical for any thread count as
// long as fn writes disjoint outputs per index.
void parallel_for(std::int64_t n, const std::function<void(std::int64_t, std::int64_t)>& fn);

}  // namespace lfkit
