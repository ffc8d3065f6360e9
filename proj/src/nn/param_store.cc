// SPDX-License-Identifier: Apache-2.0

#include "bcddi/nn/param_store.h"

#include <utility>

#include "bcddi/errors.h"

namespace bcddi::nn {

Rng ParamRng(const std::string& name, std::uint64_t seed) {
  return Rng(seed + seed_offset::kInit + Fnv1a64(name));
}

Param& ParamStore::Add(const std::string& name, Tensor value) {
  if (params_.count(name) != 0) {
    throw ConfigError("duplicate parameter name '" + name + "'");
  }
  Param p;
  p.grad = Tensor::ZerosLike(value);
  p.m = Tensor::ZerosLike(value);
  p.v = Tensor::ZerosLike(value);
  p.value = std::move(value);
  return params_.emplace(name, std::move(p)).first->second;
}

Param& ParamStore::AddGaussian(const std::string& name, Shape shape,
                               double stddev, std::uint64_t seed) {
  Tensor t(std::move(shape));
  Rng rng = ParamRng(name, seed);
  for (double& v : t.data()) v = stddev * rng.Normal();
  return Add(name, std::move(t));
}

Param& ParamStore::AddZeros(const std::string& name, Shape shape) {
  return Add(name, Tensor(std::move(shape)));
}

Param& ParamStore::AddConstant(const std::string& name, Shape shape,
                               double value) {
  return Add(name, Tensor(std::move(shape), value));
}

bool ParamStore::Contains(const std::string& name) const {
  return params_.count(name) != 0;
}

Param& ParamStore::Get(const std::string& name) {
  auto it = params_.find(name);
  if (it == params_.end()) {
    throw ConfigError("unknown parameter '" + name + "'");
  }
  return it->second;
}

const Param& ParamStore::Get(const std::string& name) const {
  auto it = params_.find(name);
  if (it == params_.end()) {
    throw ConfigError("unknown parameter '" + name + "'");
  }
  return it->second;
}

void ParamStore::Remove(const std::string& name) { params_.erase(name); }

void ParamStore::ZeroGrad() {
  for (auto& [name, p] : params_) p.grad.Fill(0.0);
}

std::size_t ParamStore::NumScalars() const {
  std::size_t n = 0;
  for (const auto& [name, p] : params_) n += p.value.size();
  return n;
}

std::vector<std::string> ParamStore::Names() const {
  std::vector<std::string> names;
  names.reserve(params_.size());
  for (const auto& [name, p] : params_) names.push_back(name);
  return names;
}

ParamStore ParamStore::CloneValues() const {
  ParamStore out;
  for (const auto& [name, p] : params_) out.Add(name, p.value);
  return out;
}

}  // namespace bcddi::nn
