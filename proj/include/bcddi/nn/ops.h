// SPDX-License-Identifier: Apache-2.0
//
// Differentiable ops. All operands are viewed as matrices (see Tensor);
// outputs are rank-2 unless noted.

#ifndef BCDDI_NN_OPS_H_
#define BCDDI_NN_OPS_H_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "bcddi/nn/param_store.h"
#include "bcddi/nn/rng.h"
#include "bcddi/nn/tape.h"

namespace bcddi::nn {

// a[m,k] . b[k,n]
Var MatMul(const Var& a, const Var& b);
// a[m,k] . b[n,k]^T
Var MatMulNT(const Var& a, const Var& b);
// x[m,in] . W[out,in]^T + b[out]
Var Affine(const Var& x, const Var& w, const Var& b);
// Affine with W and b looked up in the store by name.
Var Linear(Tape& tape, ParamStore& store, const std::string& w_name,
           const std::string& b_name, const Var& x);

Var Add(const Var& a, const Var& b);
Var Sub(const Var& a, const Var& b);
Var Mul(const Var& a, const Var& b);
// x[m,n] + row[1,n] broadcast over rows.
Var AddRow(const Var& x, const Var& row);
Var Scale(const Var& a, double s);
Var AddScalar(const Var& a, double s);

Var Tanh(const Var& a);
Var Sigmoid(const Var& a);
Var Exp(const Var& a);
// tanh approximation of GELU.
Var Gelu(const Var& a);
// Elementwise clamp; gradient is zero where the clamp is active.
Var Clamp(const Var& a, double lo, double hi);

Var ConcatCols(const std::vector<Var>& parts);
Var ConcatRows(const std::vector<Var>& parts);
Var SliceCols(const Var& a, std::size_t start, std::size_t len);
Var SliceRows(const Var& a, std::size_t start, std::size_t len);
// Column means over all rows: [m,n] -> [1,n].
Var MeanRows(const Var& a);
// [m,n] -> [1, m*n], row-major.
Var Flatten(const Var& a);
// Scalar sum of all entries.
Var Sum(const Var& a);

// Row-wise softmax with max subtraction.
Var Softmax(const Var& a);
Var LogSoftmax(const Var& a);

// Mean over rows of -log(max(p[r, t_r], 1e-12)). Throws IndexError if a
// target is out of range and ShapeError if counts disagree.
Var CrossEntropy(const Var& probs, std::span<const std::size_t> targets);
// Sum over r < targets.size() of -logp[r, t_r].
Var NllSum(const Var& log_probs, std::span<const std::size_t> targets);

// Row-wise layer normalization with learned gain and shift.
Var LayerNorm(const Var& x, const Var& gain, const Var& shift,
              double eps = 1e-5);

// Valid cross-correlation. x[len,in], kernel (width,in,out), bias (out).
// Output [len - width + 1, out].
Var Conv1d(const Var& x, const Var& kernel, const Var& bias);

// Inverted dropout: keeps an entry when rng.Uniform() >= p and scales kept
// entries by 1/(1-p). Identity when train is false or p == 0.
Var Dropout(const Var& x, double p, Rng* rng, bool train);

// Rows of a [vocab, d] parameter table; gradients scatter into the store.
Var GatherRows(Tape& tape, ParamStore& store, const std::string& name,
               std::span<const std::size_t> ids);
Var GatherRows(Tape& tape, const ParamStore& store, const std::string& name,
               std::span<const std::size_t> ids);

}  // namespace bcddi::nn

#endif  // BCDDI_NN_OPS_H_
