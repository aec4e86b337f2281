// Copyright 2026 The lfkit Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>

#include "lfkit/eval.hpp"
#include "lfkit/geometry.hpp"
#include "test_helpers.hpp"

using namespace lfkit;

TEST_SUITE_BEGIN("geometry");

TEST_CASE("bilinear sampling hits lattice values exactly") {
  Rng rng(3);
  Image img = test::random_image(7, 5, rng);
  for (int y = 0; y < 5; ++y)
    for (int x = 0; x < 7; ++x)
      CHECK(bilinear_sample(img, x, y) == doctest::Approx(img.at(x, y)).epsilon(1e-12));
}

TEST_CASE("bilinear sampling averages midpoints") {
  Image img(2, 1, 1);
  img.at(0, 0) = 0.2f;
  img.at(1, 0) = 0.8f;
  CHECK(bilinear_sample(img, 0.5, 0.0) == doctest::Approx(0.5));
}

TEST_CASE("bilinear sampling clamps to the border") {
  Image img = test::constant_image(4, 4, 0.7f);
  CHECK(bilinear_sample(img, -3.7, 1.0) == doctest::Approx(0.7));
  CHECK(bilinear_sample(img, 10.0, -2.0) == doctest::Approx(0.7));
  CHECK_THROWS_AS(bilinear_sample(img, std::nan(""), 0.0), Error);
  CHECK_THROWS_AS(bilinear_sample(Image{}, 0.0, 0.0), Error);
}

TEST_CASE("warp with zero disparity is the identity") {
  Rng rng(4);
  Image src = test::random_image(9, 9, rng);
  DisparityMap d{{2, 3}, Image(9, 9, 1, 0.0f)};
  Image out = backward_warp(src, {1, 1}, {2, 3}, d);
  for (std::size_t i = 0; i < src.data.size(); ++i) CHECK(out.data[i] == src.data[i]);
}

TEST_CASE("warp with zero angular offset is the identity for any disparity") {
  Rng rng(5);
  Image src = test::random_image(9, 9, rng);
  DisparityMap d{{2, 2}, test::random_image(9, 9, rng)};
  Image out = backward_warp(src, {2, 2}, {2, 2}, d);
  for (std::size_t i = 0; i < src.data.size(); ++i) CHECK(out.data[i] == src.data[i]);
}

TEST_CASE("unit disparity with unit v-offset shifts a ramp by one pixel") {
  // hand evaluation: src(x) = x/8, out(x) = src(x+1) for x <= W-2
  const int w = 8;
  Image src(w, w, 1);
  for (int y = 0; y < w; ++y)
    for (int x = 0; x < w; ++x) src.at(x, y) = static_cast<float>(x) / w;
  DisparityMap d{{1, 2}, Image(w, w, 1, 1.0f)};
  Image out = backward_warp(src, {1, 1}, {1, 2}, d);
  for (int y = 0; y < w; ++y) {
    for (int x = 0; x + 1 < w; ++x)
      CHECK(out.at(x, y) == doctest::Approx((x + 1.0) / w).epsilon(1e-6));
    CHECK(out.at(w - 1, y) == doctest::Approx((w - 1.0) / w));  // clamped edge
  }
}

TEST_CASE("integer disparity with unit angular offset equals an integer shift") {
  Rng rng(6);
  Image src = test::random_image(12, 12, rng);
  DisparityMap d{{2, 1}, Image(12, 12, 1, 2.0f)};
  Image out = backward_warp(src, {1, 1}, {2, 1}, d);  // du=1: y shifts by 2
  for (int y = 0; y + 2 < 12; ++y)
    for (int x = 0; x < 12; ++x) CHECK(out.at(x, y) == doctest::Approx(src.at(x, y + 2)));
}

TEST_CASE("warping a constant image yields the constant") {
  Rng rng(7);
  Image src = test::constant_image(10, 10, 0.42f);
  DisparityMap d{{3, 3}, test::random_image(10, 10, rng)};
  for (float& v : d.map.data) v = static_cast<float>(v * 8.0 - 4.0);
  Image out = backward_warp(src, {1, 1}, {3, 3}, d);
  for (float v : out.data) CHECK(v == doctest::Approx(0.42f));
}

TEST_CASE("warp validates disparity dimensions") {
  Image src(4, 4, 1);
  DisparityMap d{{1, 2}, Image(3, 3, 1)};
  CHECK_THROWS_AS(backward_warp(src, {1, 1}, {1, 2}, d), Error);
}

TEST_CASE("PSV slab at the true disparity reproduces the target view") {
  const double d_true = 1.25;
  SceneSpec spec = simple_scene_spec({3, 3}, 48, 48, 1, d_true, d_true);
  Rng rng(21);
  SyntheticScene scene = make_synthetic_scene(spec, rng);

  SamplingPattern pattern{{{1, 1}}};
  const AngularCoord target{1, 2};
  std::vector<Image> views{scene.light_field().view({1, 1})};
  PlaneSweepVolume psv = build_psv(views, pattern, target, {0.0, d_true, 2.0});

  Image gt = scene.light_field().view(target);
  Image mask = scene.occlusion_mask_analytic(target, {1, 1});
  float max_err = 0.0f;
  for (int y = 0; y < 48; ++y)
    for (int x = 0; x < 48; ++x)
      if (mask.at(x, y) == 0.0f)
        max_err = std::max(max_err, std::abs(psv.slabs[0][1].at(x, y) - gt.at(x, y)));
  CHECK(max_err <= 1e-3f);
}

TEST_CASE("PSV of constant views is constant; zero plane is the unwarped input") {
  Rng rng(22);
  SamplingPattern pattern{{{1, 1}, {3, 3}}};
  std::vector<Image> views{test::constant_image(8, 8, 0.3f), test::constant_image(8, 8, 0.6f)};
  PlaneSweepVolume psv = build_psv(views, pattern, {2, 2}, {-1.0, 0.0, 1.0});
  REQUIRE(psv.view_count() == 2);
  REQUIRE(psv.plane_count() == 3);
  for (float v : psv.slabs[0][0].data) CHECK(v == doctest::Approx(0.3f));
  for (float v : psv.slabs[1][2].data) CHECK(v == doctest::Approx(0.6f));

  Image textured = test::random_image(8, 8, rng);
  PlaneSweepVolume psv2 = build_psv({textured, textured}, pattern, {2, 2}, {-1.0, 0.0, 1.0});
  for (std::size_t i = 0; i < textured.data.size(); ++i)
    CHECK(psv2.slabs[0][1].data[i] == textured.data[i]);
}

TEST_CASE("PSV construction validates its inputs") {
  std::vector<Image> views{Image(4, 4, 1)};
  SamplingPattern pattern{{{1, 1}}};
  CHECK_THROWS_AS(build_psv(views, pattern, {1, 1}, {-1.0, 0.0, 1.0}), Error);  // collision
  CHECK_THROWS_AS(build_psv(views, pattern, {1, 2}, {0.0}), Error);             // single plane
  CHECK_THROWS_AS(build_psv(views, pattern, {1, 2}, {1.0, 0.0}), Error);        // not increasing
}

TEST_CASE("confidence blending: identity, average, selection") {
  Rng rng(23);
  Image a = test::random_image(6, 6, rng);
  Image b = test::random_image(6, 6, rng);

  ConfidenceMaps one{{1, 2}, {test::constant_image(6, 6, 1.0f)}};
  Image out1 = blend_confidence({a}, one);
  for (std::size_t i = 0; i < a.data.size(); ++i) CHECK(out1.data[i] == doctest::Approx(a.data[i]));

  ConfidenceMaps half{{1, 2}, {test::constant_image(6, 6, 0.5f), test::constant_image(6, 6, 0.5f)}};
  Image out2 = blend_confidence({a, b}, half);
  for (std::size_t i = 0; i < a.data.size(); ++i)
    CHECK(out2.data[i] == doctest::Approx(0.5f * (a.data[i] + b.data[i])));

  // per-pixel one-hot selection
  ConfidenceMaps pick{{1, 2}, {Image(6, 6, 1), Image(6, 6, 1)}};
  for (int y = 0; y < 6; ++y)
    for (int x = 0; x < 6; ++x) {
      const bool first = (x + y) % 2 == 0;
      pick.maps[0].at(x, y) = first ? 1.0f : 0.0f;
      pick.maps[1].at(x, y) = first ? 0.0f : 1.0f;
    }
  Image out3 = blend_confidence({a, b}, pick);
  for (int y = 0; y < 6; ++y)
    for (int x = 0; x < 6; ++x)
      CHECK(out3.at(x, y) == doctest::Approx((x + y) % 2 == 0 ? a.at(x, y) : b.at(x, y)));
}

TEST_CASE("blending validates shapes and counts") {
  ConfidenceMaps conf{{1, 2}, {Image(4, 4, 1, 1.0f)}};
  CHECK_THROWS_AS(blend_confidence({Image(3, 3, 1)}, conf), Error);
  CHECK_THROWS_AS(blend_confidence({Image(4, 4, 1), Image(4, 4, 1)}, conf), Error);
  CHECK_THROWS_AS(blend_confidence({}, conf), Error);
}

TEST_CASE("convex blending stays within the per-pixel min/max envelope") {
  Rng rng(24);
  std::vector<Image> imgs;
  for (int k = 0; k < 3; ++k) imgs.push_back(test::random_image(5, 5, rng));
  ConfidenceMaps conf{{1, 2}, {}};
  Image w0 = test::random_image(5, 5, rng), w1 = test::random_image(5, 5, rng),
        w2 = test::random_image(5, 5, rng);
  for (int y = 0; y < 5; ++y)
    for (int x = 0; x < 5; ++x) {
      const float z = w0.at(x, y) + w1.at(x, y) + w2.at(x, y);
      w0.at(x, y) /= z;
      w1.at(x, y) /= z;
      w2.at(x, y) /= z;
    }
  conf.maps = {w0, w1, w2};
  conf.validate();
  Image out = blend_confidence(imgs, conf);
  for (int y = 0; y < 5; ++y)
    for (int x = 0; x < 5; ++x) {
      const float lo = std::min({imgs[0].at(x, y), imgs[1].at(x, y), imgs[2].at(x, y)});
      const float hi = std::max({imgs[0].at(x, y), imgs[1].at(x, y), imgs[2].at(x, y)});
      CHECK(out.at(x, y) >= lo - 1e-6f);
      CHECK(out.at(x, y) <= hi + 1e-6f);
    }
}

TEST_CASE("Lambertian consistency on an occlusion-free scene") {
  SceneSpec spec = simple_scene_spec({3, 3}, 48, 48, 1, 1.4, 1.4);
  Rng rng(25);
  SyntheticScene scene = make_synthetic_scene(spec, rng);
  const AngularCoord p{1, 1}, q{3, 2};
  Image warped = backward_warp(scene.light_field().view(p), p, q,
                               scene.ground_truth_disparity(q));
  Image gt = scene.light_field().view(q);
  Image mask = scene.occlusion_mask_analytic(q, p);
  float max_err = 0.0f;
  for (int y = 0; y < 48; ++y)
    for (int x = 0; x < 48; ++x)
      if (mask.at(x, y) == 0.0f)
        max_err = std::max(max_err, std::abs(warped.at(x, y) - gt.at(x, y)));
  CHECK(max_err <= 2e-2f);
}

TEST_CASE("disparity map validation") {
  DisparityMap d{{1, 1}, Image(3, 3, 1, 1.5f)};
  CHECK_NOTHROW(d.validate(2.0));
  CHECK_THROWS_AS(d.validate(1.0), Error);
  d.map.at(1, 1) = std::numeric_limits<float>::quiet_NaN();
  CHECK_THROWS_AS(d.validate(10.0), Error);
}

TEST_SUITE_END();
