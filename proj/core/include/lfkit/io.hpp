// Copyright 2026 The lfkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>
#include <utility>

#include "lfkit/image.hpp"
#include "lfkit/light_field.hpp"

namespace lfkit {

// 8-bit gray or RGB PNG. Values quantized with round(v * 255) on save and
// mapped back via /255 on load.
void save_png8(const std::string& path, const Image& img);
Image load_png8(const std::string& path);

// Portable float map, little-endian (scale -1.0), rows bottom-up.
// "Pf" for 1 channel, "PF" for 3.
void save_pfm(const std::string& path, const Image& img);
Image load_pfm(const std::string& path);

enum class ContainerFormat { kPng8, kPfm };

struct ContainerOptions {
  ContainerFormat format = ContainerFormat::kPfm;
  std::optional<std::pair<double, double>> disparity_range;
};

// Directory container: meta.json plus one view_{u:02d}_{v:02d}.{png,pfm} per
// angular cell. Samples are clamped to [0, 1] on load.
void save_lightfield(const LightField& lf, const std::string& dir,
                     const ContainerOptions& options = {});
LightField load_lightfield(const std::string& dir);

// Disparity range recorded in the container manifest, if any.
std::optional<std::pair<double, double>> load_container_disparity_range(const std::string& dir);

}  // namespace lfkit
