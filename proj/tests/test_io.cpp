// Copyright 2026 The lfkit Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "lfkit/io.hpp"
#include "test_helpers.hpp"

using namespace lfkit;
namespace fs = std::filesystem;

TEST_SUITE_BEGIN("io");

TEST_CASE("PFM round-trip is bit-exact") {
  test::TempDir dir("pfm");
  Rng rng(7);
  for (int channels : {1, 3}) {
    Image img = test::random_image(13, 9, rng, channels);
    const std::string path = dir.str() + "/img.pfm";
    save_pfm(path, img);
    Image back = load_pfm(path);
    REQUIRE(back.same_shape(img));
    for (std::size_t i = 0; i < img.data.size(); ++i) CHECK(back.data[i] == img.data[i]);
  }
}

TEST_CASE("PNG8 round-trip is within half a quantization step") {
  test::TempDir dir("png");
  Rng rng(8);
  for (int channels : {1, 3}) {
    Image img = test::random_image(17, 11, rng, channels);
    const std::string path = dir.str() + "/img.png";
    save_png8(path, img);
    Image back = load_png8(path);
    REQUIRE(back.same_shape(img));
    for (std::size_t i = 0; i < img.data.size(); ++i)
      CHECK(std::abs(back.data[i] - img.data[i]) <= 1.0f / 510.0f + 1e-7f);
  }
}

namespace {

LightField random_lf(AngularGrid grid, int w, int h, int c, Rng& rng) {
  LightField lf(grid, w, h, c);
  for (float& v : lf.data()) v = static_cast<float>(rng.uniform());
  return lf;
}

}  // namespace

TEST_CASE("float container round-trip is the identity") {
  test::TempDir dir("lf_float");
  Rng rng(9);
  LightField lf = random_lf({3, 2}, 6, 5, 1, rng);
  save_lightfield(lf, dir.str(), {ContainerFormat::kPfm, std::make_pair(-2.0, 2.0)});
  LightField back = load_lightfield(dir.str());
  REQUIRE(back.grid() == lf.grid());
  REQUIRE(back.width() == lf.width());
  for (std::size_t i = 0; i < lf.data().size(); ++i) CHECK(back.data()[i] == lf.data()[i]);
  auto range = load_container_disparity_range(dir.str());
  REQUIRE(range.has_value());
  CHECK(range->first == doctest::Approx(-2.0));
}

TEST_CASE("8-bit container round-trip is quantization-bounded") {
  test::TempDir dir("lf_png");
  Rng rng(10);
  LightField lf = random_lf({2, 2}, 8, 8, 3, rng);
  save_lightfield(lf, dir.str(), {ContainerFormat::kPng8, std::nullopt});
  LightField back = load_lightfield(dir.str());
  for (std::size_t i = 0; i < lf.data().size(); ++i)
    CHECK(std::abs(back.data()[i] - lf.data()[i]) <= 1.0f / 510.0f + 1e-7f);
}

TEST_CASE("missing view file is reported") {
  test::TempDir dir("lf_missing");
  Rng rng(11);
  LightField lf = random_lf({3, 4}, 4, 4, 1, rng);
  save_lightfield(lf, dir.str());
  // keep the file count intact but remove view (3,4)
  fs::rename(dir.path() / "view_03_04.pfm", dir.path() / "view_09_09.pfm");
  CHECK_THROWS_WITH_AS(load_lightfield(dir.str()), doctest::Contains("missing view"), Error);
}

TEST_CASE("manifest grid mismatch is reported") {
  test::TempDir dir("lf_mismatch");
  Rng rng(12);
  LightField lf = random_lf({7, 7}, 4, 4, 1, rng);
  save_lightfield(lf, dir.str());
  {
    std::ofstream meta(dir.path() / "meta.json");
    meta << R"({"M":5,"N":5,"W":4,"H":4,"C":1,"format":"pfm"})";
  }
  CHECK_THROWS_WITH_AS(load_lightfield(dir.str()), doctest::Contains("grid mismatch"), Error);
}

TEST_CASE("unreadable view file is reported") {
  test::TempDir dir("lf_bad");
  Rng rng(13);
  LightField lf = random_lf({2, 2}, 4, 4, 1, rng);
  save_lightfield(lf, dir.str());
  {
    std::ofstream bad(dir.path() / "view_01_01.pfm", std::ios::trunc);
    bad << "not a pfm";
  }
  CHECK_THROWS_AS(load_lightfield(dir.str()), Error);
}

TEST_CASE("write to an impossible path fails cleanly") {
  LightField lf({1, 1}, 2, 2, 1);
  CHECK_THROWS_AS(save_lightfield(lf, "/dev/null/nothing"), Error);
  Image img(2, 2, 1, 0.5f);
  CHECK_THROWS_AS(save_pfm("/dev/null/img.pfm", img), Error);
  CHECK_THROWS_AS(save_png8("/dev/null/img.png", img), Error);
}

TEST_CASE("values are clamped to [0,1] on load") {
  test::TempDir dir("lf_clamp");
  LightField lf({1, 1}, 2, 2, 1);
  lf.data() = {1.5f, -0.25f, 0.5f, 0.75f};
  save_lightfield(lf, dir.str());
  LightField back = load_lightfield(dir.str());
  CHECK(back.data()[0] == 1.0f);
  CHECK(back.data()[1] == 0.0f);
  CHECK(back.data()[2] == 0.5f);
}

TEST_SUITE_END();
