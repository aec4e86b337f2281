// Copyright 2026 The lfkit Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <set>

#include "lfkit/eval.hpp"
#include "lfkit/light_field.hpp"
#include "test_helpers.hpp"

using namespace lfkit;

TEST_SUITE_BEGIN("lf-core");

TEST_CASE("complement of the 4-corner pattern on 7x7 has 45 coords") {
  AngularGrid grid{7, 7};
  SamplingPattern corners{{{1, 1}, {1, 7}, {7, 1}, {7, 7}}};
  TargetSet q = complement_pattern(grid, corners);
  CHECK(q.size() == 45);
  for (const AngularCoord& c : q.coords) CHECK_FALSE(corners.contains(c));
}

TEST_CASE("full sampling leaves an empty complement") {
  AngularGrid grid{2, 2};
  SamplingPattern all{{{1, 1}, {1, 2}, {2, 1}, {2, 2}}};
  CHECK(complement_pattern(grid, all).size() == 0);
}

TEST_CASE("3x3 center pattern complement excludes the center, row-major") {
  AngularGrid grid{3, 3};
  SamplingPattern center{{{2, 2}}};
  TargetSet q = complement_pattern(grid, center);
  REQUIRE(q.size() == 8);
  CHECK(q.coords.front() == AngularCoord{1, 1});
  CHECK(q.coords.back() == AngularCoord{3, 3});
  for (std::size_t i = 1; i < q.coords.size(); ++i)
    CHECK(grid.index(q.coords[i - 1]) < grid.index(q.coords[i]));
}

TEST_CASE("pattern and complement partition the grid") {
  Rng rng(11);
  AngularGrid grid{5, 6};
  for (int trial = 0; trial < 20; ++trial) {
    const int k = 1 + static_cast<int>(rng.uniform_int(10));
    SamplingPattern p;
    std::set<int> used;
    while (static_cast<int>(used.size()) < k)
      used.insert(static_cast<int>(rng.uniform_int(grid.cells())));
    for (int cell : used) p.coords.push_back(grid.coord(cell));
    TargetSet q = complement_pattern(grid, p);
    CHECK(p.size() + q.size() == grid.cells());
    for (const AngularCoord& c : q.coords) CHECK_FALSE(p.contains(c));
  }
}

TEST_CASE("pattern validation rejects out-of-grid and duplicates") {
  AngularGrid grid{3, 3};
  CHECK_THROWS_AS((SamplingPattern{{{0, 1}}}.validate(grid)), Error);
  CHECK_THROWS_AS((SamplingPattern{{{4, 1}}}.validate(grid)), Error);
  CHECK_THROWS_AS((SamplingPattern{{{1, 1}, {1, 1}}}.validate(grid)), Error);
  CHECK_THROWS_AS((SamplingPattern{}.validate(grid)), Error);
  CHECK_THROWS_AS(complement_pattern(grid, SamplingPattern{{{5, 5}}}), Error);
}

TEST_CASE("constant light field gives a constant EPI") {
  LightField lf({3, 4}, 8, 6, 1);
  for (float& v : lf.data()) v = 0.25f;
  Epi epi = extract_epi(lf, EpiOrientation::kHorizontal, 2, 3);
  for (float v : epi.image.data) CHECK(v == doctest::Approx(0.25f));
}

TEST_CASE("EPI dimensions are angular x spatial") {
  LightField lf({7, 7}, 256, 32, 1);
  Epi h = extract_epi(lf, EpiOrientation::kHorizontal, 4, 10);
  CHECK(h.image.height == 7);    // v axis
  CHECK(h.image.width == 256);   // x axis
  Epi v = extract_epi(lf, EpiOrientation::kVertical, 3, 100);
  CHECK(v.image.height == 7);    // u axis
  CHECK(v.image.width == 32);    // y axis
  CHECK_THROWS_AS(extract_epi(lf, EpiOrientation::kHorizontal, 8, 0), Error);
  CHECK_THROWS_AS(extract_epi(lf, EpiOrientation::kHorizontal, 1, 32), Error);
}

namespace {

// Offset of the mean-subtracted cross-correlation peak between two rows.
int correlation_peak_shift(const Image& epi, int row_a, int row_b, int max_shift) {
  double mean_a = 0.0, mean_b = 0.0;
  for (int x = 0; x < epi.width; ++x) {
    mean_a += epi.at(x, row_a);
    mean_b += epi.at(x, row_b);
  }
  mean_a /= epi.width;
  mean_b /= epi.width;
  double best = -1e30;
  int best_shift = 0;
  for (int s = -max_shift; s <= max_shift; ++s) {
    double corr = 0.0;
    int n = 0;
    for (int x = 0; x < epi.width; ++x) {
      const int xs = x + s;
      if (xs < 0 || xs >= epi.width) continue;
      corr += (epi.at(x, row_a) - mean_a) * (epi.at(xs, row_b) - mean_b);
      ++n;
    }
    corr /= n;
    if (corr > best) {
      best = corr;
      best_shift = s;
    }
  }
  return best_shift;
}

}  // namespace

TEST_CASE("EPI of a fronto-parallel plane has slope equal to its disparity") {
  // With out(x) = src(x + (q-p) d), content moves by -d pixels per +1 angular
  // step: row v+1 equals row v shifted left by d.
  const double d = 1.0;
  SceneSpec spec = simple_scene_spec({5, 5}, 64, 64, 1, d, d);
  Rng rng(41);
  SyntheticScene scene = make_synthetic_scene(spec, rng);
  Epi epi = extract_epi(scene.light_field(), EpiOrientation::kHorizontal, 3, 32);
  for (int row = 0; row + 1 < epi.image.height; ++row) {
    CHECK(correlation_peak_shift(epi.image, row, row + 1, 3) == -static_cast<int>(d));
    // exact for integer disparity on interior pixels
    for (int x = 0; x + 1 < epi.image.width; ++x)
      CHECK(epi.image.at(x, row + 1) ==
            doctest::Approx(epi.image.at(x + 1, row)).epsilon(1e-6));
  }
}

TEST_CASE("BT.601 luma") {
  Image white(2, 2, 3, 1.0f);
  CHECK(to_luma(white).at(0, 0) == doctest::Approx(1.0f));

  Image green(1, 1, 3, 0.0f);
  green.at(0, 0, 1) = 1.0f;
  CHECK(to_luma(green).at(0, 0) == doctest::Approx(0.587f));

  Image gray(1, 1, 3, 0.4f);
  CHECK(to_luma(gray).at(0, 0) == doctest::Approx(0.4f));

  Image mono(1, 1, 1, 0.5f);
  CHECK_THROWS_AS(to_luma(mono), Error);
}

TEST_CASE("pattern string parse and format round-trip") {
  SamplingPattern p = parse_pattern("1,1;1,7;7,1;7,7");
  REQUIRE(p.size() == 4);
  CHECK(p.coords[1] == AngularCoord{1, 7});
  CHECK(format_pattern(p) == "1,1;1,7;7,1;7,7");
  CHECK_THROWS_AS(parse_pattern("1;2"), Error);
  CHECK_THROWS_AS(parse_pattern(""), Error);
}

TEST_SUITE_END();
