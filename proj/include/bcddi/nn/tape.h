// SPDX-License-Identifier: Apache-2.0
//
// Reverse-mode differentiation over a linear tape of matrix-valued nodes.
//
// Every forward op appends one node holding its value and a closure that
// pushes the node's gradient into its inputs. Tape::Backward seeds the loss
// and walks the tape in reverse creation order. Parameter leaves alias the
// ParamStore tensors directly: their values are read in place and their
// gradients accumulate into ParamStore::grad, so a parameter requested twice
// on the same tape is a single leaf (weight tying is structural).

#ifndef BCDDI_NN_TAPE_H_
#define BCDDI_NN_TAPE_H_

#include <cstddef>
#include <deque>
#include <functional>
#include <initializer_list>
#include <map>
#include <span>
#include <string>
#include <utility>

#include "bcddi/nn/param_store.h"
#include "bcddi/nn/tensor.h"

namespace bcddi::nn {

class Tape;

struct Node {
  Tensor own_value;
  const Tensor* ref_value = nullptr;
  Tensor own_grad;
  Tensor* ref_grad = nullptr;
  bool needs_grad = false;
  const char* op = "";
  std::function<void(Node&)> backward;

  const Tensor& value() const { return ref_value ? *ref_value : own_value; }
  Tensor& grad() { return ref_grad ? *ref_grad : own_grad; }
};

class Var {
 public:
  Var() = default;
  Var(Tape* tape, Node* node) : tape_(tape), node_(node) {}

  const Tensor& value() const { return node_->value(); }
  std::size_t rows() const { return value().rows(); }
  std::size_t cols() const { return value().cols(); }
  bool needs_grad() const { return node_->needs_grad; }
  bool valid() const { return node_ != nullptr; }

  Tape* tape() const { return tape_; }
  Node* node() const { return node_; }

 private:
  Tape* tape_ = nullptr;
  Node* node_ = nullptr;
};

class Tape {
 public:
  // With grad disabled no closures are recorded and parameter leaves are
  // plain reads; used for inference and finite differences.
  explicit Tape(bool grad_enabled = true) : grad_enabled_(grad_enabled) {}
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  bool grad_enabled() const { return grad_enabled_; }
  std::size_t size() const { return nodes_.size(); }

  Var Constant(Tensor value);
  Var Param(ParamStore& store, const std::string& name);
  Var Param(const ParamStore& store, const std::string& name);

  // Appends an op node. Throws NumericError if `value` has a NaN or Inf.
  // `backward` runs only if some input needs a gradient.
  Var Record(Tensor value, std::span<const Var> inputs, const char* op,
             std::function<void(Node&)> backward);
  Var Record(Tensor value, std::initializer_list<Var> inputs, const char* op,
             std::function<void(Node&)> backward) {
    return Record(std::move(value), std::span<const Var>(inputs.begin(), inputs.size()),
                  op, std::move(backward));
  }

  // Leaf whose value and gradient alias external storage.
  Var Alias(const Tensor& value, Tensor* grad, const char* op);

  // Seeds d(loss)/d(loss) = seed and propagates to every leaf.
  void Backward(const Var& loss, double seed = 1.0);

 private:
  bool grad_enabled_;
  std::deque<Node> nodes_;
  std::map<std::pair<const void*, std::string>, Node*> params_;
};

}  // namespace bcddi::nn

#endif  // BCDDI_NN_TAPE_H_
