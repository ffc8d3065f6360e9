// SPDX-License-Identifier: Apache-2.0

#include "bcddi/nn/layers.h"

#include <cmath>
#include <vector>

#include "bcddi/errors.h"

namespace bcddi::nn {

void AddGruParams(ParamStore& store, const std::string& prefix,
                  std::size_t input, std::size_t hidden, std::uint64_t seed,
                  double stddev) {
  for (const char* gate : {"z", "r", "n"}) {
    store.AddGaussian(prefix + ".W" + gate, {hidden, input}, stddev, seed);
    store.AddGaussian(prefix + ".U" + gate, {hidden, hidden}, stddev, seed);
    store.AddZeros(prefix + ".b" + gate, {hidden});
  }
}

Var GruStep(Tape& tape, ParamStore& store, const std::string& prefix,
            const Var& x, const Var& h_prev) {
  auto p = [&](const char* n) { return tape.Param(store, prefix + n); };
  const Tensor& uz = p(".Uz").value();
  if (h_prev.cols() != uz.rows() || x.cols() != p(".Wz").value().cols()) {
    throw ShapeError("gru_step '" + prefix + "': input width " +
                     std::to_string(x.cols()) + ", hidden width " +
                     std::to_string(h_prev.cols()) + " vs parameters " +
                     p(".Wz").value().ShapeString());
  }
  Var z = Sigmoid(Add(Affine(x, p(".Wz"), p(".bz")), MatMulNT(h_prev, p(".Uz"))));
  Var r = Sigmoid(Add(Affine(x, p(".Wr"), p(".br")), MatMulNT(h_prev, p(".Ur"))));
  Var n = Tanh(Add(Affine(x, p(".Wn"), p(".bn")), Mul(r, MatMulNT(h_prev, p(".Un")))));
  // (1 - z) * n + z * h
  Var one_minus_z = AddScalar(Scale(z, -1.0), 1.0);
  return Add(Mul(one_minus_z, n), Mul(z, h_prev));
}

void AttentionConfig::Validate() const {
  if (n_heads == 0 || d_model == 0 || d_model % n_heads != 0) {
    throw ConfigError("d_model " + std::to_string(d_model) +
                      " is not divisible by n_heads " + std::to_string(n_heads));
  }
  if (ff_dim == 0) throw ConfigError("ff_dim must be positive");
  if (dropout < 0.0 || dropout >= 1.0) {
    throw ConfigError("dropout must lie in [0, 1)");
  }
}

void AddAttentionParams(ParamStore& store, const std::string& prefix,
                        const AttentionConfig& config, std::uint64_t seed) {
  config.Validate();
  std::size_t d = config.d_model;
  store.AddConstant(prefix + ".ln1.g", {d}, 1.0);
  store.AddZeros(prefix + ".ln1.b", {d});
  for (const char* m : {"q", "k", "v", "o"}) {
    store.AddGaussian(prefix + ".attn.W" + m, {d, d}, 0.02, seed);
    store.AddZeros(prefix + ".attn.b" + m, {d});
  }
  store.AddConstant(prefix + ".ln2.g", {d}, 1.0);
  store.AddZeros(prefix + ".ln2.b", {d});
  store.AddGaussian(prefix + ".ffn.W1", {config.ff_dim, d}, 0.02, seed);
  store.AddZeros(prefix + ".ffn.b1", {config.ff_dim});
  store.AddGaussian(prefix + ".ffn.W2", {d, config.ff_dim}, 0.02, seed);
  store.AddZeros(prefix + ".ffn.b2", {d});
}

Var AttentionBlock(Tape& tape, ParamStore& store, const std::string& prefix,
                   const Var& x, const AttentionConfig& config, Rng* rng,
                   bool train) {
  config.Validate();
  if (x.cols() != config.d_model) {
    throw ShapeError("attention_block '" + prefix + "': input width " +
                     std::to_string(x.cols()) + " vs d_model " +
                     std::to_string(config.d_model));
  }
  auto p = [&](const std::string& n) { return tape.Param(store, prefix + n); };
  std::size_t dh = config.d_model / config.n_heads;
  double inv_sqrt = 1.0 / std::sqrt(static_cast<double>(dh));

  Var h = LayerNorm(x, p(".ln1.g"), p(".ln1.b"));
  Var q = Affine(h, p(".attn.Wq"), p(".attn.bq"));
  Var k = Affine(h, p(".attn.Wk"), p(".attn.bk"));
  Var v = Affine(h, p(".attn.Wv"), p(".attn.bv"));
  std::vector<Var> heads;
  heads.reserve(config.n_heads);
  for (std::size_t i = 0; i < config.n_heads; ++i) {
    Var qh = SliceCols(q, i * dh, dh);
    Var kh = SliceCols(k, i * dh, dh);
    Var vh = SliceCols(v, i * dh, dh);
    Var weights = Softmax(Scale(MatMulNT(qh, kh), inv_sqrt));
    heads.push_back(MatMul(weights, vh));
  }
  Var attn = config.n_heads == 1 ? heads.front() : ConcatCols(heads);
  attn = Affine(attn, p(".attn.Wo"), p(".attn.bo"));
  Var a = Add(x, Dropout(attn, config.dropout, rng, train));

  Var f = LayerNorm(a, p(".ln2.g"), p(".ln2.b"));
  f = Gelu(Affine(f, p(".ffn.W1"), p(".ffn.b1")));
  f = Affine(f, p(".ffn.W2"), p(".ffn.b2"));
  return Add(a, Dropout(f, config.dropout, rng, train));
}

}  // namespace bcddi::nn
