// SPDX-License-Identifier: Apache-2.0

#ifndef BCDDI_NN_GRAD_CHECK_H_
#define BCDDI_NN_GRAD_CHECK_H_

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "bcddi/nn/param_store.h"
#include "bcddi/nn/tape.h"

namespace bcddi::nn {

// Builds the scalar loss on the given tape from the store's current values.
// Must be deterministic: dropout off, noise frozen.
using LossFn = std::function<Var(Tape&, ParamStore&)>;

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::string worst_param;
  std::size_t worst_index = 0;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
  std::size_t n_checked = 0;
};

// Compares the reverse-mode gradient of every entry of every parameter
// (or only `names` when non-empty) with the central difference
// (f(w+h) - f(w-h)) / 2h. Relative error is
//   |analytic - numeric| / max(|analytic|, |numeric|, floor)
// where the floor keeps entries with vanishing gradient from dividing
// round-off by ~0. Leaves the store's values and gradients as it found them.
GradCheckResult GradCheck(const LossFn& loss_fn, ParamStore& store,
                          double h = 1e-5, double floor = 1e-3,
                          const std::vector<std::string>& names = {});

}  // namespace bcddi::nn

#endif  // BCDDI_NN_GRAD_CHECK_H_
