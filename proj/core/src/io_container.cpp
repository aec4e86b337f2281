// Copyright 2026 The lfkit Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <regex>

#include <json.hpp>

#include "lfkit/io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace lfkit {
namespace {

std::string view_name(AngularCoord c, ContainerFormat format) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "view_%02d_%02d.%s", c.u, c.v,
                format == ContainerFormat::kPng8 ? "png" : "pfm");
  return buf;
}

json read_meta(const std::string& dir) {
  const fs::path meta_path = fs::path(dir) / "meta.json";
  std::ifstream in(meta_path);
  if (!in) throw Error("cannot open '" + meta_path.string() + "'");
  json meta;
  try {
    in >> meta;
  } catch (const json::exception& e) {
    throw Error("bad manifest '" + meta_path.string() + "': " + e.what());
  }
  return meta;
}

}  // namespace

void save_lightfield(const LightField& lf, const std::string& dir,
                     const ContainerOptions& options) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (!fs::is_directory(dir)) throw Error("cannot create directory '" + dir + "'");

  json meta;
  meta["M"] = lf.grid().rows;
  meta["N"] = lf.grid().cols;
  meta["W"] = lf.width();
  meta["H"] = lf.height();
  meta["C"] = lf.channels();
  meta["format"] = options.format == ContainerFormat::kPng8 ? "png8" : "pfm";
  if (options.disparity_range)
    meta["disparity_range"] = {options.disparity_range->first, options.disparity_range->second};

  {
    const fs::path meta_path = fs::path(dir) / "meta.json";
    std::ofstream out(meta_path);
    if (!out) throw Error("cannot write '" + meta_path.string() + "'");
    out << meta.dump(2) << "\n";
    if (!out) throw Error("I/O failure writing '" + meta_path.string() + "'");
  }

  for (int u = 1; u <= lf.grid().rows; ++u)
    for (int v = 1; v <= lf.grid().cols; ++v) {
      const AngularCoord c{u, v};
      const std::string path = (fs::path(dir) / view_name(c, options.format)).string();
      if (options.format == ContainerFormat::kPng8)
        save_png8(path, lf.view(c));
      else
        save_pfm(path, lf.view(c));
    }
}

LightField load_lightfield(const std::string& dir) {
  const json meta = read_meta(dir);
  for (const char* key : {"M", "N", "W", "H", "C"})
    if (!meta.contains(key)) throw Error("manifest missing key '" + std::string(key) + "'");

  const int rows = meta["M"].get<int>();
  const int cols = meta["N"].get<int>();
  const int width = meta["W"].get<int>();
  const int height = meta["H"].get<int>();
  const int channels = meta["C"].get<int>();
  const std::string format = meta.value("format", "png8");
  if (format != "png8" && format != "pfm")
    throw Error("unknown container format '" + format + "'");
  const ContainerFormat fmt = format == "png8" ? ContainerFormat::kPng8 : ContainerFormat::kPfm;

  // The manifest grid must match the set of view files exactly.
  const std::regex view_re(R"(view_\d{2}_\d{2}\.(png|pfm))");
  int view_files = 0;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    if (std::regex_match(entry.path().filename().string(), view_re)) ++view_files;
  }
  if (view_files != rows * cols) {
    throw Error("grid mismatch: manifest says " + std::to_string(rows) + "x" +
                std::to_string(cols) + " but " + std::to_string(view_files) +
                " view files present");
  }

  LightField lf({rows, cols}, width, height, channels);
  for (int u = 1; u <= rows; ++u)
    for (int v = 1; v <= cols; ++v) {
      const AngularCoord c{u, v};
      const fs::path path = fs::path(dir) / view_name(c, fmt);
      if (!fs::exists(path))
        throw Error("missing view (" + std::to_string(u) + "," + std::to_string(v) + ")");
      Image img = fmt == ContainerFormat::kPng8 ? load_png8(path.string())
                                                : load_pfm(path.string());
      if (img.width != width || img.height != height || img.channels != channels)
        throw Error("view " + path.filename().string() + " shape mismatch");
      for (float& v2 : img.data) v2 = std::clamp(v2, 0.0f, 1.0f);
      lf.set_view(c, img);
    }
  return lf;
}

std::optional<std::pair<double, double>> load_container_disparity_range(const std::string& dir) {
  const json meta = read_meta(dir);
  if (!meta.contains("disparity_range")) return std::nullopt;
  const auto& dr = meta["disparity_range"];
  return std::make_pair(dr.at(0).get<double>(), dr.at(1).get<double>());
}

}  // namespace lfkit
