// Copyright 2026 The lfkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "lfkit/nn/optim.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>

#include <json.hpp>

using nlohmann::json;

namespace lfkit::nn {

namespace {
constexpr char kMagic[] = "LFKITCKPT1\n";

double byteswap_double(double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, 8);
  std::uint64_t out = 0;
  for (int i = 0; i < 8; ++i) out = (out << 8) | ((bits >> (8 * i)) & 0xff);
  std::memcpy(&v, &out, 8);
  return v;
}

constexpr bool host_little_endian() { return std::endian::native == std::endian::little; }
}  // namespace

void ParamStore::add(const std::string& name, Tensor init) {
  if (entries_.count(name)) throw Error("parameter '" + name + "' already exists");
  Entry e;
  e.m = Tensor(init.shape);
  e.v = Tensor(init.shape);
  e.value = std::move(init);
  entries_.emplace(name, std::move(e));
}

Tensor& ParamStore::at(const std::string& name) { return entry(name).value; }

const Tensor& ParamStore::at(const std::string& name) const {
  auto it = entries_.find(name);
  if (it == entries_.end()) throw Error("unknown parameter '" + name + "'");
  return it->second.value;
}

ParamStore::Entry& ParamStore::entry(const std::string& name) {
  auto it = entries_.find(name);
  if (it == entries_.end()) throw Error("unknown parameter '" + name + "'");
  return it->second;
}

std::int64_t ParamStore::total_parameters() const {
  std::int64_t n = 0;
  for (const auto& [name, e] : entries_) n += e.value.numel();
  return n;
}

bool ParamStore::all_finite() const {
  for (const auto& [name, e] : entries_)
    if (!nn::all_finite(e.value)) return false;
  return true;
}

void adam_step(ParamStore& store, const std::map<std::string, Tensor>& grads,
               const AdamConfig& cfg) {
  store.bump_step();
  const auto t = static_cast<double>(store.step());
  const double bc1 = 1.0 - std::pow(cfg.beta1, t);
  const double bc2 = 1.0 - std::pow(cfg.beta2, t);
  for (auto& [name, e] : store.entries()) {
    auto git = grads.find(name);
    if (git == grads.end()) throw Error("missing gradient for parameter '" + name + "'");
    const Tensor& g = git->second;
    if (!g.same_shape(e.value))
      throw Error("gradient shape mismatch for '" + name + "': " + g.shape_str() + " vs " +
                  e.value.shape_str());
    for (std::int64_t i = 0; i < g.numel(); ++i) {
      e.m.v[i] = static_cast<real>(cfg.beta1 * e.m.v[i] + (1.0 - cfg.beta1) * g.v[i]);
      e.v.v[i] = static_cast<real>(cfg.beta2 * e.v.v[i] + (1.0 - cfg.beta2) * g.v[i] * g.v[i]);
      const double mhat = e.m.v[i] / bc1;
      const double vhat = e.v.v[i] / bc2;
      e.value.v[i] -= static_cast<real>(cfg.lr * mhat / (std::sqrt(vhat) + cfg.eps));
    }
  }
}

Tensor uniform_fan_in(const std::vector<int>& shape, int fan_in, Rng& rng) {
  if (fan_in < 1) throw Error("fan_in must be positive");
  Tensor t(shape);
  const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
  for (std::int64_t i = 0; i < t.numel(); ++i)
    t.v[i] = static_cast<real>(rng.uniform(-bound, bound));
  return t;
}

void save_checkpoint(const ParamStore& store, const std::string& path,
                     const std::string& extra_json) {
  json manifest;
  manifest["format"] = "lfkit-checkpoint";
  manifest["dtype"] = "float64-le";
  manifest["step"] = store.step();
  json tensors = json::array();
  for (const auto& [name, e] : store.entries()) {
    json t;
    t["name"] = name;
    t["shape"] = e.value.shape;
    tensors.push_back(std::move(t));
  }
  manifest["tensors"] = std::move(tensors);
  try {
    manifest["extra"] = json::parse(extra_json);
  } catch (const json::exception& e) {
    throw Error(std::string("bad extra manifest JSON: ") + e.what());
  }

  const std::string text = manifest.dump();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  char header[32];
  std::snprintf(header, sizeof(header), "%s%016zu\n", kMagic, text.size());
  out << header << text;
  std::vector<double> buf;
  for (const auto& [name, e] : store.entries()) {
    buf.resize(e.value.v.size());
    for (std::size_t i = 0; i < buf.size(); ++i) {
      double v = static_cast<double>(e.value.v[i]);
      buf[i] = host_little_endian() ? v : byteswap_double(v);
    }
    out.write(reinterpret_cast<const char*>(buf.data()),
              static_cast<std::streamsize>(buf.size() * sizeof(double)));
  }
  if (!out) throw Error("I/O failure writing '" + path + "'");
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  std::string magic(sizeof(kMagic) - 1, '\0');
  in.read(magic.data(), static_cast<std::streamsize>(magic.size()));
  if (!in || magic != kMagic) throw Error("'" + path + "' is not a checkpoint file");
  std::string len_line(17, '\0');
  in.read(len_line.data(), 17);
  if (!in || len_line.back() != '\n') throw Error("corrupt checkpoint header");
  const std::size_t manifest_len = std::stoull(len_line.substr(0, 16));
  std::string text(manifest_len, '\0');
  in.read(text.data(), static_cast<std::streamsize>(manifest_len));
  if (!in) throw Error("truncated checkpoint manifest");

  json manifest;
  try {
    manifest = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(std::string("bad checkpoint manifest: ") + e.what());
  }

  Checkpoint ckpt;
  ckpt.extra_json = manifest.value("extra", json::object()).dump();
  ckpt.params.set_step(manifest.value("step", std::int64_t(0)));
  std::vector<double> buf;
  for (const auto& t : manifest.at("tensors")) {
    const std::string name = t.at("name").get<std::string>();
    const std::vector<int> shape = t.at("shape").get<std::vector<int>>();
    Tensor tensor(shape);
    buf.resize(static_cast<std::size_t>(tensor.numel()));
    in.read(reinterpret_cast<char*>(buf.data()),
            static_cast<std::streamsize>(buf.size() * sizeof(double)));
    if (!in) throw Error("truncated checkpoint blob at '" + name + "'");
    for (std::size_t i = 0; i < buf.size(); ++i) {
      double v = host_little_endian() ? buf[i] : byteswap_double(buf[i]);
      tensor.v[i] = static_cast<real>(v);
    }
    ckpt.params.add(name, std::move(tensor));
  }
  return ckpt;
}

}  // namespace lfkit::nn
