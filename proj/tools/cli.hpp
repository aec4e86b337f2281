// Copyright 2026 The lfkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

namespace lfkit::cli {

// Dispatches one command. Exit codes: 0 success, 1 usage error, 2 runtime
// error. Diagnostics go to stderr; machine-readable results (JSON) to stdout
// or the --out path.
int run(const std::vector<std::string>& args);

}  // namespace lfkit::cli
