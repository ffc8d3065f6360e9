// SPDX-License-Identifier: Apache-2.0

#ifndef BCDDI_NN_LAYERS_H_
#define BCDDI_NN_LAYERS_H_

#include <cstddef>
#include <cstdint>
#include <string>

#include "bcddi/nn/ops.h"

namespace bcddi::nn {

// GRU cell parameters under `prefix`:
//   Wz Wr Wn (hidden,input)  Uz Ur Un (hidden,hidden)  bz br bn (hidden)
//
//   z = sigmoid(Wz x + Uz h + bz)
//   r = sigmoid(Wr x + Ur h + br)
//   n = tanh(Wn x + bn + r * (Un h))
//   h' = (1 - z) * n + z * h
void AddGruParams(ParamStore& store, const std::string& prefix,
                  std::size_t input, std::size_t hidden, std::uint64_t seed,
                  double stddev = 0.02);

Var GruStep(Tape& tape, ParamStore& store, const std::string& prefix,
            const Var& x, const Var& h_prev);

struct AttentionConfig {
  std::size_t d_model = 128;
  std::size_t n_heads = 4;
  std::size_t ff_dim = 512;
  double dropout = 0.1;

  // Throws ConfigError unless d_model is a positive multiple of n_heads.
  void Validate() const;
};

// Pre-norm transformer block under `prefix`:
//   a = x + Drop(Wo . MHA(LN1(x)) + bo)
//   y = a + Drop(W2 . gelu(W1 . LN2(a) + b1) + b2)
// Parameters: ln1.g ln1.b attn.{Wq,bq,Wk,bk,Wv,bv,Wo,bo} ln2.g ln2.b
//             ffn.{W1,b1,W2,b2}.
void AddAttentionParams(ParamStore& store, const std::string& prefix,
                        const AttentionConfig& config, std::uint64_t seed);

Var AttentionBlock(Tape& tape, ParamStore& store, const std::string& prefix,
                   const Var& x, const AttentionConfig& config, Rng* rng,
                   bool train);

}  // namespace bcddi::nn

#endif  // BCDDI_NN_LAYERS_H_
