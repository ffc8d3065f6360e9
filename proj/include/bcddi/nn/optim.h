// SPDX-License-Identifier: Apache-2.0

#ifndef BCDDI_NN_OPTIM_H_
#define BCDDI_NN_OPTIM_H_

#include "bcddi/nn/param_store.h"

namespace bcddi::nn {

struct AdamOptions {
  double lr = 2e-5;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// One bias-corrected Adam update of every parameter, then zeroes all
// gradients:
//   m = b1 m + (1-b1) g;  v = b2 v + (1-b2) g^2
//   w -= lr * (m / (1-b1^t)) / (sqrt(v / (1-b2^t)) + eps)
void AdamStep(ParamStore& store, const AdamOptions& options);

// L2 norm of all gradients, accumulated in sorted-name, row-major order.
double GlobalGradNorm(const ParamStore& store);

// Rescales gradients so their global norm is at most max_norm. Returns the
// norm before clipping. Throws NumericError on a non-finite norm.
double ClipGradNorm(ParamStore& store, double max_norm);

}  // namespace bcddi::nn

#endif  // BCDDI_NN_OPTIM_H_
