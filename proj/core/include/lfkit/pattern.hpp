// Copyright 2026 The lfkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "lfkit/light_field.hpp"
#include "lfkit/rng.hpp"

namespace lfkit::pattern {

// Relaxed nearest-sample responsibilities: (MN-K) x K, rows sum to 1.
struct AssignmentMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> values;  // row-major

  double at(int r, int c) const { return values[static_cast<std::size_t>(r) * cols + c]; }
};

// K real-valued angular positions inside [1,M] x [1,N].
struct ContinuousPattern {
  std::vector<std::pair<double, double>> centers;  // (u, v)
  int size() const { return static_cast<int>(centers.size()); }
};

// Sum over novel cells q of min_k ||q - p_k||^2. Integer-exact (distances of
// grid coordinates are integers). Full-grid patterns score 0.
double pattern_objective(const SamplingPattern& pattern, const AngularGrid& grid);

// Mean Euclidean (not squared) distance from each novel cell to its nearest
// sample. Throws when the pattern covers the whole grid.
double min_distance_metric(const SamplingPattern& pattern, const AngularGrid& grid);

struct AnnealResult {
  ContinuousPattern centers;
  AssignmentMatrix assignment;
  double hard_objective = 0.0;          // k-means cost of the final centers
  std::vector<double> stage_objectives; // hard objective after each temperature stage
  bool converged = true;
};

// Soft-assignment alternating optimization over all MN grid cells, geometric
// temperature decay, then a hard (Lloyd) polish. Init-sensitive: restarts
// explore different local optima.
AnnealResult anneal_solve(const AngularGrid& grid, int k, Rng& rng);

// Snap continuous centers to distinct grid cells. Candidate cells per center
// are the floor/ceil combinations; assignments are ranked by
// pattern_objective, ties broken by larger distinct-row+distinct-col count,
// then lexicographically. Joint enumeration when the candidate product is
// small, greedy with the same ranking otherwise; collisions resolve to the
// next-nearest free cell.
SamplingPattern round_pattern(const ContinuousPattern& cont, const AngularGrid& grid);

// anneal_solve + round_pattern across `restarts` seeded restarts; returns the
// rounded pattern with the minimum objective (lexicographic tie-break).
SamplingPattern optimize_pattern(const AngularGrid& grid, int k, int restarts, std::uint64_t seed);

struct OracleResult {
  SamplingPattern pattern;
  double objective = 0.0;
};

// Exhaustive minimum over all C(MN, K) patterns (lexicographically first among
// ties). Throws when the candidate count exceeds `budget`.
OracleResult exhaustive_oracle(const AngularGrid& grid, int k, std::uint64_t budget = 10'000'000);

// Pattern file: one "u,v" pair per line.
SamplingPattern load_pattern_file(const std::string& path);
void save_pattern_file(const SamplingPattern& pattern, const std::string& path);

}  // namespace lfkit::pattern
