// SPDX-License-Identifier: Apache-2.0

#include "bcddi/nn/tape.h"

#include <utility>

#include "bcddi/errors.h"

namespace bcddi::nn {

Var Tape::Constant(Tensor value) {
  if (!value.AllFinite()) throw NumericError("non-finite constant");
  Node& n = nodes_.emplace_back();
  n.own_value = std::move(value);
  n.op = "constant";
  return Var(this, &n);
}

Var Tape::Param(ParamStore& store, const std::string& name) {
  if (!grad_enabled_) return Param(std::as_const(store), name);
  auto key = std::make_pair(static_cast<const void*>(&store), name);
  if (auto it = params_.find(key); it != params_.end()) {
    return Var(this, it->second);
  }
  nn::Param& p = store.Get(name);
  Node& n = nodes_.emplace_back();
  n.ref_value = &p.value;
  n.ref_grad = &p.grad;
  n.needs_grad = true;
  n.op = "param";
  params_.emplace(std::move(key), &n);
  return Var(this, &n);
}

Var Tape::Param(const ParamStore& store, const std::string& name) {
  Node& n = nodes_.emplace_back();
  n.ref_value = &store.Get(name).value;
  n.op = "param";
  return Var(this, &n);
}

Var Tape::Alias(const Tensor& value, Tensor* grad, const char* op) {
  Node& n = nodes_.emplace_back();
  n.ref_value = &value;
  n.op = op;
  if (grad_enabled_ && grad != nullptr) {
    n.ref_grad = grad;
    n.needs_grad = true;
  }
  return Var(this, &n);
}

Var Tape::Record(Tensor value, std::span<const Var> inputs,
                 const char* op, std::function<void(Node&)> backward) {
  if (!value.AllFinite()) {
    throw NumericError(std::string("non-finite value produced by ") + op);
  }
  Node& n = nodes_.emplace_back();
  n.own_value = std::move(value);
  n.op = op;
  if (grad_enabled_) {
    for (const Var& in : inputs) {
      if (in.needs_grad()) {
        n.needs_grad = true;
        break;
      }
    }
    if (n.needs_grad) n.backward = std::move(backward);
  }
  return Var(this, &n);
}

void Tape::Backward(const Var& loss, double seed) {
  if (!grad_enabled_) throw ConfigError("backward on a no-grad tape");
  if (loss.tape() != this) throw ConfigError("loss belongs to another tape");
  if (loss.value().size() != 1) {
    throw ShapeError("backward needs a scalar loss, got " +
                     loss.value().ShapeString());
  }
  if (!loss.needs_grad()) return;
  for (Node& n : nodes_) {
    if (n.needs_grad && n.ref_grad == nullptr) {
      n.own_grad = Tensor::ZerosLike(n.own_value);
    }
  }
  loss.node()->grad()[0] += seed;
  for (auto it = nodes_.rbegin(); it != nodes_.rend(); ++it) {
    if (it->backward) it->backward(*it);
  }
}

}  // namespace bcddi::nn
