// Copyright 2026 The lfkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "lfkit/nn/tensor.hpp"
#include "lfkit/rng.hpp"

namespace lfkit::nn {

// Named trainable parameters plus Adam state. Mutation (adam_step) requires
// exclusive access; reads are safe to share.
class ParamStore {
 public:
  struct Entry {
    Tensor value;
    Tensor m;  // first moment
    Tensor v;  // second moment
  };

  void add(const std::string& name, Tensor init);
  bool contains(const std::string& name) const { return entries_.count(name) != 0; }
  Tensor& at(const std::string& name);
  const Tensor& at(const std::string& name) const;
  Entry& entry(const std::string& name);

  const std::map<std::string, Entry>& entries() const { return entries_; }
  std::map<std::string, Entry>& entries() { return entries_; }

  std::int64_t step() const { return step_; }
  void set_step(std::int64_t s) { step_ = s; }
  void bump_step() { ++step_; }

  std::int64_t total_parameters() const;
  bool all_finite() const;

 private:
  std::map<std::string, Entry> entries_;  // ordered: manifest/blob order
  std::int64_t step_ = 0;
};

struct AdamConfig {
  double lr = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Standard Adam with bias correction; increments the store step count once.
// Throws if a parameter has no gradient or shapes mismatch.
void adam_step(ParamStore& store, const std::map<std::string, Tensor>& grads,
               const AdamConfig& cfg);

// Uniform fan-in init: U(-1/sqrt(fan_in), 1/sqrt(fan_in)).
Tensor uniform_fan_in(const std::vector<int>& shape, int fan_in, Rng& rng);

// Checkpoint file: "LFKITCKPT1\n", 16-digit manifest byte count, "\n",
// manifest JSON (names, shapes, step, hyperparameters, seed, extra), then the
// raw little-endian float64 values of every tensor in manifest order.
void save_checkpoint(const ParamStore& store, const std::string& path,
                     const std::string& extra_json = "{}");
struct Checkpoint {
  ParamStore params;
  std::string extra_json;
};
Checkpoint load_checkpoint(const std::string& path);

}  // namespace lfkit::nn
