// Copyright 2026 The lfkit Authors
// SPDX-License-Identifier: Apache-2.0

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include "lfkit/io.hpp"

namespace lfkit {
namespace {

static_assert(sizeof(float) == 4, "PFM requires 32-bit floats");

float byteswap_float(float v) {
  std::uint32_t bits;
  std::memcpy(&bits, &v, 4);
  bits = ((bits & 0x000000ffu) << 24) | ((bits & 0x0000ff00u) << 8) |
         ((bits & 0x00ff0000u) >> 8) | ((bits & 0xff000000u) >> 24);
  std::memcpy(&v, &bits, 4);
  return v;
}

constexpr bool host_little_endian() { return std::endian::native == std::endian::little; }

}  // namespace

void save_pfm(const std::string& path, const Image& img) {
  if (img.empty()) throw Error("cannot save empty image");
  if (img.channels != 1 && img.channels != 3)
    throw Error("PFM supports 1 or 3 channels");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out << (img.channels == 1 ? "Pf" : "PF") << "\n"
      << img.width << " " << img.height << "\n"
      << "-1.0\n";  // negative scale = little-endian
  std::vector<float> row(static_cast<std::size_t>(img.width) * img.channels);
  for (int y = img.height - 1; y >= 0; --y) {  // PFM rows are bottom-up
    for (int x = 0; x < img.width; ++x)
      for (int c = 0; c < img.channels; ++c) {
        float v = img.at(x, y, c);
        row[static_cast<std::size_t>(x) * img.channels + c] =
            host_little_endian() ? v : byteswap_float(v);
      }
    out.write(reinterpret_cast<const char*>(row.data()),
              static_cast<std::streamsize>(row.size() * sizeof(float)));
  }
  if (!out) throw Error("I/O failure writing '" + path + "'");
}

Image load_pfm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  std::string magic;
  int width = 0, height = 0;
  double scale = 0.0;
  in >> magic >> width >> height >> scale;
  if (!in || (magic != "Pf" && magic != "PF"))
    throw Error("'" + path + "' is not a PFM file");
  if (width < 1 || height < 1) throw Error("bad PFM dimensions in '" + path + "'");
  in.get();  // single whitespace after the scale
  const int channels = magic == "Pf" ? 1 : 3;
  const bool file_little = scale < 0.0;

  Image img(width, height, channels);
  std::vector<float> row(static_cast<std::size_t>(width) * channels);
  for (int y = height - 1; y >= 0; --y) {
    in.read(reinterpret_cast<char*>(row.data()),
            static_cast<std::streamsize>(row.size() * sizeof(float)));
    if (!in) throw Error("truncated PFM '" + path + "'");
    for (int x = 0; x < width; ++x)
      for (int c = 0; c < channels; ++c) {
        float v = row[static_cast<std::size_t>(x) * channels + c];
        if (file_little != host_little_endian()) v = byteswap_float(v);
        img.at(x, y, c) = v;
      }
  }
  return img;
}

}  // namespace lfkit
