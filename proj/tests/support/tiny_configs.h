// SPDX-License-Identifier: Apache-2.0
//
// Small model configurations shared by unit and acceptance tests.

#ifndef BCDDI_TESTS_SUPPORT_TINY_CONFIGS_H_
#define BCDDI_TESTS_SUPPORT_TINY_CONFIGS_H_

#include <string>
#include <vector>

#include "bcddi/chemvae.h"
#include "bcddi/ddimodel.h"

namespace bcddi::testing {

inline const std::vector<std::string> kFiveSmiles = {"CCO", "CC(=O)C", "C1=CC=CC=C1",
                                                      "CN(C)C(=N)N=C(N)N", "C(=O)(N)N"};

inline chemvae::ChemVaeConfig TinyVaeConfig(std::size_t vocab_size) {
  chemvae::ChemVaeConfig c;
  c.max_len = 24;
  c.vocab_size = vocab_size;
  c.latent_dim = 16;
  c.encoder_hidden = 32;
  c.decoder_hidden = 32;
  c.conv_widths = {3, 3, 4};
  c.conv_channels = {4, 4, 5};
  c.gru_layers = 3;
  c.init_std = 0.0;  // fan-in
  c.zero_init_head = false;
  return c;
}

inline chemvae::VaeTrainOptions TinyVaeTraining() {
  chemvae::VaeTrainOptions o;
  o.epochs = 500;
  o.batch_size = 5;
  o.lr = 5e-3;
  o.clip_norm = 5.0;
  o.seed = 7;
  return o;
}

// d=8, one layer, two heads; dropout off so forward passes are deterministic.
inline ddi::ModelConfig TinyModelConfig(std::size_t vocab_size, ddi::Mode mode) {
  ddi::ModelConfig c;
  c.encoder.vocab_size = vocab_size;
  c.encoder.d_model = 8;
  c.encoder.n_layers = 1;
  c.encoder.n_heads = 2;
  c.encoder.ff_dim = 16;
  c.encoder.max_seq_len = 32;
  c.encoder.dropout = 0.0;
  c.chem_dim = 6;
  c.fusion_dim = 4;
  c.mode = mode;
  c.seed = 13;
  return c;
}

// Mentions are the first occurrences of e1 and e2 (ASCII text only).
inline corpus::PairInstance MakePair(const std::string& text, const std::string& e1,
                                     const std::string& e2,
                                     corpus::RelationLabel label = corpus::RelationLabel::kNegative) {
  corpus::PairInstance p;
  p.sentence_id = "s0";
  p.pair_id = "s0.p0";
  p.sentence_text = text;
  std::size_t a = text.find(e1);
  std::size_t b = text.find(e2, a + e1.size());
  p.e1 = corpus::EntityMention{"s0.e0", e1, a, a + e1.size(), "drug", "", ""};
  p.e2 = corpus::EntityMention{"s0.e1", e2, b, b + e2.size(), "drug", "", ""};
  p.label = label;
  return p;
}

}  // namespace bcddi::testing

#endif  // BCDDI_TESTS_SUPPORT_TINY_CONFIGS_H_
