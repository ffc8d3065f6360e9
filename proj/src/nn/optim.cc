// SPDX-License-Identifier: Apache-2.0

#include "bcddi/nn/optim.h"

#include <cmath>

#include "bcddi/errors.h"

namespace bcddi::nn {

void AdamStep(ParamStore& store, const AdamOptions& options) {
  for (auto& [name, p] : store) {
    ++p.step;
    double t = static_cast<double>(p.step);
    double c1 = 1.0 - std::pow(options.beta1, t);
    double c2 = 1.0 - std::pow(options.beta2, t);
    for (std::size_t i = 0; i < p.value.size(); ++i) {
      double g = p.grad[i];
      p.m[i] = options.beta1 * p.m[i] + (1.0 - options.beta1) * g;
      p.v[i] = options.beta2 * p.v[i] + (1.0 - options.beta2) * g * g;
      double m_hat = p.m[i] / c1;
      double v_hat = p.v[i] / c2;
      p.value[i] -= options.lr * m_hat / (std::sqrt(v_hat) + options.eps);
    }
    p.grad.Fill(0.0);
  }
}

double GlobalGradNorm(const ParamStore& store) {
  double sq = 0.0;
  for (const auto& [name, p] : store) {
    for (double g : p.grad.data()) sq += g * g;
  }
  return std::sqrt(sq);
}

double ClipGradNorm(ParamStore& store, double max_norm) {
  double norm = GlobalGradNorm(store);
  if (!std::isfinite(norm)) throw NumericError("non-finite gradient norm");
  if (norm > max_norm) {
    double scale = max_norm / norm;
    for (auto& [name, p] : store) {
      for (double& g : p.grad.data()) g *= scale;
    }
  }
  return norm;
}

}  // namespace bcddi::nn
