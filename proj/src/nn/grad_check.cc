// SPDX-License-Identifier: Apache-2.0

#include "bcddi/nn/grad_check.h"

#include <algorithm>
#include <cmath>

namespace bcddi::nn {
namespace {

double Evaluate(const LossFn& loss_fn, ParamStore& store) {
  Tape tape(/*grad_enabled=*/false);
  return loss_fn(tape, store).value()[0];
}

}  // namespace

GradCheckResult GradCheck(const LossFn& loss_fn, ParamStore& store, double h,
                          double floor, const std::vector<std::string>& names) {
  std::vector<Tensor> saved_grads;
  for (auto& [name, p] : store) {
    saved_grads.push_back(p.grad);
    p.grad.Fill(0.0);
  }
  {
    Tape tape;
    Var loss = loss_fn(tape, store);
    tape.Backward(loss);
  }

  GradCheckResult result;
  std::vector<std::string> targets = names.empty() ? store.Names() : names;
  for (const std::string& name : targets) {
    Param& p = store.Get(name);
    for (std::size_t i = 0; i < p.value.size(); ++i) {
      double original = p.value[i];
      p.value[i] = original + h;
      double up = Evaluate(loss_fn, store);
      p.value[i] = original - h;
      double down = Evaluate(loss_fn, store);
      p.value[i] = original;
      double numeric = (up - down) / (2.0 * h);
      double analytic = p.grad[i];
      double denom = std::max({std::abs(analytic), std::abs(numeric), floor});
      double rel = std::abs(analytic - numeric) / denom;
      ++result.n_checked;
      if (rel > result.max_rel_error || result.worst_param.empty()) {
        result.max_rel_error = rel;
        result.worst_param = name;
        result.worst_index = i;
        result.worst_analytic = analytic;
        result.worst_numeric = numeric;
      }
    }
  }

  std::size_t k = 0;
  for (auto& [name, p] : store) p.grad = std::move(saved_grads[k++]);
  return result;
}

}  // namespace bcddi::nn
