// SPDX-License-Identifier: Apache-2.0

#ifndef BCDDI_NN_PARAM_STORE_H_
#define BCDDI_NN_PARAM_STORE_H_

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "bcddi/nn/rng.h"
#include "bcddi/nn/tensor.h"

namespace bcddi::nn {

struct Param {
  Tensor value;
  Tensor grad;
  // Adam first and second moments.
  Tensor m;
  Tensor v;
  std::uint64_t step = 0;
};

// Named table of trainable tensors. Iteration is sorted by name, which
// fixes the order of every reduction over parameters.
class ParamStore {
 public:
  // Adds a new entry; throws ConfigError if the name exists.
  Param& Add(const std::string& name, Tensor value);
  // Gaussian N(0, std^2) init drawn from a generator seeded with
  // seed + Fnv1a64(name), so the values do not depend on creation order.
  Param& AddGaussian(const std::string& name, Shape shape, double stddev,
                     std::uint64_t seed);
  Param& AddZeros(const std::string& name, Shape shape);
  Param& AddConstant(const std::string& name, Shape shape, double value);

  bool Contains(const std::string& name) const;
  Param& Get(const std::string& name);
  const Param& Get(const std::string& name) const;
  Tensor& Value(const std::string& name) { return Get(name).value; }
  const Tensor& Value(const std::string& name) const { return Get(name).value; }

  void Remove(const std::string& name);
  void ZeroGrad();
  std::size_t size() const { return params_.size(); }
  bool empty() const { return params_.empty(); }
  std::size_t NumScalars() const;
  std::vector<std::string> Names() const;

  // Deep copy of values only; optimizer state and gradients are reset.
  ParamStore CloneValues() const;

  auto begin() { return params_.begin(); }
  auto end() { return params_.end(); }
  auto begin() const { return params_.begin(); }
  auto end() const { return params_.end(); }

 private:
  std::map<std::string, Param> params_;
};

// Generator for the init of a named tensor under a run seed.
Rng ParamRng(const std::string& name, std::uint64_t seed);

}  // namespace bcddi::nn

#endif  // BCDDI_NN_PARAM_STORE_H_
