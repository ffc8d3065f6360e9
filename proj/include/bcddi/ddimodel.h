// SPDX-License-Identifier: Apache-2.0
//
// Relation classifier over a pair of drug mentions.
//
//   H        = encoder(tokens)                         [len, d]
//   H1'      = Wshared tanh(mean(H[i..j])) + bshared   entity 1
//   H2'      = Wshared tanh(mean(H[k..m])) + bshared   entity 2 (same weights)
//   H0'      = W0 tanh(H[0]) + b0                      [CLS]
//   text     = softmax(W3 [H0';H1';H2'] + b3)          W3: (N, 3d)
//   chm      = Wc [c1;c2] + bc                         Wc: (f, 2 chem_dim)
//   fused    = softmax(W3f [H0';H1';H2';chm] + b3f)    W3f: (N, 3d + f)
//
// Dropout is applied to [H0';H1';H2'] during training; chm is not dropped.

#ifndef BCDDI_DDIMODEL_H_
#define BCDDI_DDIMODEL_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "bcddi/chemvae.h"
#include "bcddi/corpus.h"
#include "bcddi/kv.h"
#include "bcddi/nn/layers.h"
#include "bcddi/nn/param_store.h"
#include "bcddi/nn/tape.h"
#include "bcddi/tokenizer.h"

namespace bcddi::ddi {

enum class Mode { kTextOnly, kFused };
std::string_view ModeName(Mode m);
// "text", "text_only", "fused". Throws ConfigError.
Mode ModeFromName(std::string_view s);

struct EncoderConfig {
  std::size_t vocab_size = 0;
  std::size_t d_model = 128;
  std::size_t n_layers = 4;
  std::size_t n_heads = 4;
  std::size_t ff_dim = 512;
  std::size_t max_seq_len = 300;
  double dropout = 0.1;

  void Validate() const;
};

struct ModelConfig {
  EncoderConfig encoder;
  std::size_t n_labels = corpus::kNumLabels;
  std::size_t chem_dim = 292;
  std::size_t fusion_dim = 128;
  Mode mode = Mode::kFused;
  // Initialization seed; also seeds fallback chemical rows created later.
  std::uint64_t seed = 0;

  void Validate() const;
  kv::KeyValues ToKeyValues() const;
  static ModelConfig FromKeyValues(const kv::KeyValues& values);
};

struct TokenizedInstance {
  std::vector<std::size_t> token_ids;   // [CLS] ... [SEP]
  std::vector<std::pair<std::size_t, std::size_t>> token_char_spans;
  std::pair<std::size_t, std::size_t> e1_range;  // inclusive token indices
  std::pair<std::size_t, std::size_t> e2_range;
  corpus::RelationLabel label = corpus::RelationLabel::kNegative;
  bool truncated = false;
};

// Entity ranges are the tokens whose spans intersect each mention. When
// the sequence exceeds max_seq_len the window slides to keep both
// mentions. Throws TokenizationError if a mention has no token and
// TruncationError if the two mentions cannot fit in one window.
TokenizedInstance Tokenize(const corpus::PairInstance& instance, const Tokenizer& tokenizer,
                           std::size_t max_seq_len);

void InitEncoderParams(nn::ParamStore& store, const EncoderConfig& config, std::uint64_t seed);

// Creates head.* (and encoder) parameters for `config.mode`. The text block
// of W3f is drawn exactly as W3 would be, so text-only and fused models
// start from the same text weights. With zero_chem, Wc, bc and the chm
// columns of W3f are zero.
void InitModelParams(nn::ParamStore& store, const ModelConfig& config, bool zero_chem = false);

// Token + position embeddings, n_layers pre-norm blocks, final layer norm.
// Throws VocabError for an id outside the vocabulary.
nn::Var EncodeText(nn::Tape& tape, nn::ParamStore& store, const EncoderConfig& config,
                   std::span<const std::size_t> ids, nn::Rng* rng, bool train);

// Wshared tanh(mean(H[a..b])) + bshared. Throws RangeError for an empty or
// out-of-bounds range.
nn::Var PoolEntity(nn::Tape& tape, nn::ParamStore& store, const nn::Var& h, std::size_t a,
                   std::size_t b);
// W0 tanh(h0) + b0.
nn::Var ClsTransform(nn::Tape& tape, nn::ParamStore& store, const nn::Var& h0);
// [H0'; H1'; H2'] -> probabilities [1, N].
nn::Var ClassifyText(nn::Tape& tape, nn::ParamStore& store, const nn::Var& text_features);
// Wc [c1; c2] + bc. Throws ShapeError unless c1, c2 have chem_dim values.
nn::Var FuseChem(nn::Tape& tape, nn::ParamStore& store, const nn::Var& c1, const nn::Var& c2,
                 std::size_t chem_dim);
nn::Var ClassifyFused(nn::Tape& tape, nn::ParamStore& store, const nn::Var& text_features,
                      const nn::Var& chm);

// Everything above the encoder: pooling, CLS transform, dropout on the text
// features, and the classifier for `mode`. c1/c2 are needed only when fused.
nn::Var HeadForward(nn::Tape& tape, nn::ParamStore& store, const ModelConfig& config,
                    const nn::Var& h, std::pair<std::size_t, std::size_t> e1,
                    std::pair<std::size_t, std::size_t> e2, const nn::Var* c1,
                    const nn::Var* c2, nn::Rng* rng, bool train);

// Full forward pass, probabilities [1, N]. `chem` is required in fused
// mode (ConfigError otherwise). On a grad-disabled tape the store is only
// read: unseen fallback drugs get their deterministic initial vector.
nn::Var Forward(nn::Tape& tape, nn::ParamStore& store, const ModelConfig& config,
                const corpus::PairInstance& instance, const TokenizedInstance& tokens,
                const chemvae::ChemLookup* chem, nn::Rng* rng, bool train);

// Argmax with ties to the lowest class index.
corpus::RelationLabel PredictLabel(std::span<const double> probs);

struct Prediction {
  corpus::RelationLabel label = corpus::RelationLabel::kNegative;
  std::vector<double> probs;
};

// Inference over a read-only store.
Prediction Predict(const nn::ParamStore& store, const ModelConfig& config,
                   const Tokenizer& tokenizer, const corpus::PairInstance& instance,
                   const chemvae::ChemLookup* chem);

}  // namespace bcddi::ddi

#endif  // BCDDI_DDIMODEL_H_
