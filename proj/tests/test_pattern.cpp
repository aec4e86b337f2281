// Copyright 2026 The lfkit Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <set>

#include "lfkit/pattern.hpp"
#include "test_helpers.hpp"

using namespace lfkit;
using namespace lfkit::pattern;

TEST_SUITE_BEGIN("pattern");

namespace {

// Independent brute-force objective for cross-checks.
double objective_reference(const SamplingPattern& p, const AngularGrid& grid) {
  double total = 0.0;
  for (int u = 1; u <= grid.rows; ++u)
    for (int v = 1; v <= grid.cols; ++v) {
      if (p.contains({u, v})) continue;
      double best = 1e30;
      for (const AngularCoord& c : p.coords)
        best = std::min(best, static_cast<double>((u - c.u) * (u - c.u) + (v - c.v) * (v - c.v)));
      total += best;
    }
  return total;
}

SamplingPattern random_pattern(const AngularGrid& grid, int k, Rng& rng) {
  std::set<int> cells;
  while (static_cast<int>(cells.size()) < k)
    cells.insert(static_cast<int>(rng.uniform_int(grid.cells())));
  SamplingPattern p;
  for (int c : cells) p.coords.push_back(grid.coord(c));
  return p;
}

}  // namespace

TEST_CASE("objective analytics") {
  AngularGrid g2{2, 2};
  SamplingPattern full{{{1, 1}, {1, 2}, {2, 1}, {2, 2}}};
  CHECK(pattern_objective(full, g2) == 0.0);

  AngularGrid g3{3, 3};
  SamplingPattern center{{{2, 2}}};
  CHECK(pattern_objective(center, g3) == 12.0);  // 4*1 + 4*2

  AngularGrid g7{7, 7};
  SamplingPattern corners{{{1, 1}, {1, 7}, {7, 1}, {7, 7}}};
  CHECK(pattern_objective(corners, g7) == objective_reference(corners, g7));
}

TEST_CASE("objective matches brute force on random patterns") {
  Rng rng(111);
  AngularGrid grid{6, 5};
  for (int trial = 0; trial < 30; ++trial) {
    SamplingPattern p = random_pattern(grid, 1 + static_cast<int>(rng.uniform_int(6)), rng);
    CHECK(pattern_objective(p, grid) == objective_reference(p, grid));
  }
}

TEST_CASE("min distance analytics") {
  AngularGrid g3{3, 3};
  SamplingPattern center{{{2, 2}}};
  CHECK(min_distance_metric(center, g3) ==
        doctest::Approx((4.0 + 4.0 * std::sqrt(2.0)) / 8.0));

  AngularGrid g7{7, 7};
  SamplingPattern corners{{{1, 1}, {1, 7}, {7, 1}, {7, 7}}};
  double expected = 0.0;
  int count = 0;
  for (int u = 1; u <= 7; ++u)
    for (int v = 1; v <= 7; ++v) {
      if (corners.contains({u, v})) continue;
      double best = 1e30;
      for (const AngularCoord& c : corners.coords)
        best = std::min(best, std::sqrt(static_cast<double>((u - c.u) * (u - c.u) +
                                                            (v - c.v) * (v - c.v))));
      expected += best;
      ++count;
    }
  CHECK(min_distance_metric(corners, g7) == doctest::Approx(expected / count));

  SamplingPattern full{{{1, 1}, {1, 2}, {1, 3}, {2, 1}, {2, 2}, {2, 3}, {3, 1}, {3, 2}, {3, 3}}};
  CHECK_THROWS_AS(min_distance_metric(full, g3), Error);
}

TEST_CASE("adding a sample never increases the metric") {
  Rng rng(112);
  AngularGrid grid{7, 7};
  for (int trial = 0; trial < 25; ++trial) {
    SamplingPattern p = random_pattern(grid, 2 + static_cast<int>(rng.uniform_int(4)), rng);
    SamplingPattern larger = p;
    for (;;) {
      AngularCoord extra = grid.coord(static_cast<int>(rng.uniform_int(grid.cells())));
      if (!larger.contains(extra)) {
        larger.coords.push_back(extra);
        break;
      }
    }
    CHECK(min_distance_metric(larger, grid) <= min_distance_metric(p, grid) + 1e-12);
  }
}

TEST_CASE("objective and metric respect the eight square symmetries") {
  AngularGrid grid{7, 7};
  Rng rng(113);
  const auto transform = [&](AngularCoord c, int sym) -> AngularCoord {
    int u = c.u, v = c.v;
    if (sym & 1) u = 8 - u;           // flip rows
    if (sym & 2) v = 8 - v;           // flip cols
    if (sym & 4) std::swap(u, v);     // transpose
    return {u, v};
  };
  for (int trial = 0; trial < 10; ++trial) {
    SamplingPattern p = random_pattern(grid, 4, rng);
    const double obj = pattern_objective(p, grid);
    const double metric = min_distance_metric(p, grid);
    for (int sym = 1; sym < 8; ++sym) {
      SamplingPattern q;
      for (const AngularCoord& c : p.coords) q.coords.push_back(transform(c, sym));
      CHECK(pattern_objective(q, grid) == obj);
      CHECK(min_distance_metric(q, grid) == doctest::Approx(metric).epsilon(1e-12));
    }
  }
}

TEST_CASE("anneal with K=1 converges to the grid mean") {
  AngularGrid grid{7, 7};
  Rng rng(114);
  AnnealResult r = anneal_solve(grid, 1, rng);
  REQUIRE(r.centers.size() == 1);
  CHECK(r.centers.centers[0].first == doctest::Approx(4.0).epsilon(1e-9));
  CHECK(r.centers.centers[0].second == doctest::Approx(4.0).epsilon(1e-9));
  CHECK(r.assignment.rows == 48);
  CHECK(r.assignment.cols == 1);
}

TEST_CASE("anneal stage objectives never increase") {
  AngularGrid grid{7, 7};
  for (std::uint64_t seed : {1ull, 2ull, 3ull, 9ull}) {
    Rng rng(seed);
    AnnealResult r = anneal_solve(grid, 3, rng);
    for (std::size_t i = 1; i < r.stage_objectives.size(); ++i)
      CHECK(r.stage_objectives[i] <= r.stage_objectives[i - 1] + 1e-9);
  }
}

TEST_CASE("anneal result is a Lloyd fixed point") {
  AngularGrid grid{5, 5};
  for (std::uint64_t seed : {4ull, 5ull, 6ull}) {
    Rng rng(seed);
    AnnealResult r = anneal_solve(grid, 2, rng);
    // one more Lloyd pass from the result must not move the hard objective
    auto centers = r.centers.centers;
    std::vector<double> su(2, 0.0), sv(2, 0.0), cnt(2, 0.0);
    for (int u = 1; u <= 5; ++u)
      for (int v = 1; v <= 5; ++v) {
        const double d0 = (u - centers[0].first) * (u - centers[0].first) +
                          (v - centers[0].second) * (v - centers[0].second);
        const double d1 = (u - centers[1].first) * (u - centers[1].first) +
                          (v - centers[1].second) * (v - centers[1].second);
        const int k = d0 <= d1 ? 0 : 1;
        su[k] += u;
        sv[k] += v;
        cnt[k] += 1.0;
      }
    double hard_before = r.hard_objective;
    for (int k = 0; k < 2; ++k)
      if (cnt[k] > 0) centers[k] = {su[k] / cnt[k], sv[k] / cnt[k]};
    double hard_after = 0.0;
    for (int u = 1; u <= 5; ++u)
      for (int v = 1; v <= 5; ++v) {
        double best = 1e30;
        for (const auto& c : centers)
          best = std::min(best, (u - c.first) * (u - c.first) + (v - c.second) * (v - c.second));
        hard_after += best;
      }
    CHECK(std::abs(hard_after - hard_before) <= 1e-9);
  }
}

TEST_CASE("rounding keeps on-grid centers and resolves collisions") {
  AngularGrid grid{5, 5};
  ContinuousPattern exact{{{2.0, 2.0}, {4.0, 5.0}}};
  SamplingPattern p = round_pattern(exact, grid);
  REQUIRE(p.size() == 2);
  CHECK(p.contains({2, 2}));
  CHECK(p.contains({4, 5}));

  ContinuousPattern colliding{{{3.0, 3.0}, {3.0, 3.0}}};
  SamplingPattern q = round_pattern(colliding, grid);
  REQUIRE(q.size() == 2);
  CHECK(q.coords[0] != q.coords[1]);
  CHECK(q.contains({3, 3}));

  CHECK_THROWS_AS(round_pattern(ContinuousPattern{{{0.0, 3.0}}}, grid), Error);
}

TEST_CASE("rounded quadrant centroids reach the exhaustive optimum on 7x7") {
  AngularGrid grid{7, 7};
  ContinuousPattern quadrants{{{2.5, 2.5}, {2.5, 5.5}, {5.5, 2.5}, {5.5, 5.5}}};
  SamplingPattern rounded = round_pattern(quadrants, grid);
  OracleResult oracle = exhaustive_oracle(grid, 4);
  CHECK(pattern_objective(rounded, grid) == oracle.objective);
}

TEST_CASE("optimize_pattern on 3x3 with K=1 picks the center") {
  SamplingPattern p = optimize_pattern({3, 3}, 1, 5, 0);
  REQUIRE(p.size() == 1);
  CHECK(p.coords[0] == AngularCoord{2, 2});
}

TEST_CASE("optimize_pattern matches the oracle for K=2 and K=3 on 7x7") {
  AngularGrid grid{7, 7};
  for (int k : {2, 3}) {
    OracleResult oracle = exhaustive_oracle(grid, k);
    SamplingPattern p = optimize_pattern(grid, k, 5, 1);
    CHECK(pattern_objective(p, grid) == oracle.objective);
  }
}

TEST_CASE("optimize_pattern is deterministic under a fixed seed") {
  SamplingPattern a = optimize_pattern({7, 7}, 4, 5, 1234);
  SamplingPattern b = optimize_pattern({7, 7}, 4, 5, 1234);
  CHECK(a.coords == b.coords);
}

TEST_CASE("optimized pattern beats 100 random patterns") {
  AngularGrid grid{7, 7};
  SamplingPattern best = optimize_pattern(grid, 4, 5, 7);
  const double best_obj = pattern_objective(best, grid);
  Rng rng(115);
  for (int i = 0; i < 100; ++i) {
    SamplingPattern p = random_pattern(grid, 4, rng);
    CHECK(best_obj <= pattern_objective(p, grid));
  }
}

TEST_CASE("oracle analytics and tie-breaking") {
  OracleResult r22 = exhaustive_oracle({2, 2}, 1);
  CHECK(r22.objective == 4.0);  // 1 + 1 + 2
  CHECK(r22.pattern.coords[0] == AngularCoord{1, 1});  // lexicographically first tie

  OracleResult r33 = exhaustive_oracle({3, 3}, 1);
  CHECK(r33.objective == 12.0);
  CHECK(r33.pattern.coords[0] == AngularCoord{2, 2});

  CHECK_THROWS_AS(exhaustive_oracle({7, 7}, 10, 1000), Error);  // budget exceeded
}

TEST_CASE("assignment matrix rows sum to one") {
  AngularGrid grid{5, 5};
  Rng rng(116);
  AnnealResult r = anneal_solve(grid, 3, rng);
  REQUIRE(r.assignment.rows == 22);
  REQUIRE(r.assignment.cols == 3);
  for (int row = 0; row < r.assignment.rows; ++row) {
    double sum = 0.0;
    for (int col = 0; col < 3; ++col) {
      const double v = r.assignment.at(row, col);
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
      sum += v;
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("pattern files round-trip") {
  test::TempDir dir("pattern");
  SamplingPattern p{{{1, 1}, {3, 4}, {7, 2}}};
  const std::string path = dir.str() + "/p.txt";
  save_pattern_file(p, path);
  SamplingPattern back = load_pattern_file(path);
  CHECK(back.coords == p.coords);
  CHECK_THROWS_AS(load_pattern_file(dir.str() + "/absent.txt"), Error);
}

TEST_SUITE_END();
