// SPDX-License-Identifier: Apache-2.0
//
// Synthetic relation corpora whose labels are learnable by construction.
//
// LeakedLabelCorpus: each sentence carries one keyword per class between
// the two drug mentions, so a linear probe on the text suffices.
// ChemOnlyCorpus: every sentence is the same text; the class is carried
// only by the drugs' identifiers, each class having its own chemical
// vectors.

#ifndef BCDDI_TESTS_SUPPORT_SYNTHETIC_H_
#define BCDDI_TESTS_SUPPORT_SYNTHETIC_H_

#include <string>
#include <vector>

#include "bcddi/chemvae.h"
#include "bcddi/corpus.h"
#include "bcddi/nn/rng.h"
#include "bcddi/train.h"

namespace bcddi::testing {

inline const char* const kClassKeywords[corpus::kNumLabels] = {"inhibits", "potentiates",
                                                                "avoid", "interacts",
                                                                "alongside"};

inline corpus::EntityMention SynthMention(const std::string& sid, int k, const std::string& text,
                                          std::size_t start) {
  return corpus::EntityMention{sid + ".e" + std::to_string(k), text, start, start + text.size(),
                               "drug", "", ""};
}

inline std::vector<corpus::PairInstance> LeakedLabelCorpus(std::size_t per_class,
                                                           std::uint64_t seed) {
  static const char* const drugs[] = {"aspirin", "warfarin", "heparin", "digoxin",
                                      "quinidine", "insulin", "lithium", "caffeine"};
  static const char* const filler[] = {"the", "patients", "given", "dose", "with", "may",
                                       "in", "plasma", "levels", "when"};
  nn::Rng rng(seed);
  std::vector<corpus::PairInstance> out;
  for (std::size_t i = 0; i < per_class; ++i) {
    for (std::size_t c = 0; c < corpus::kNumLabels; ++c) {
      std::string sid = "syn.s" + std::to_string(out.size());
      std::string d1 = drugs[rng.Below(8)], d2 = drugs[rng.Below(8)];
      std::string text = filler[rng.Below(10)];
      text += " ";
      std::size_t a = text.size();
      text += d1 + " " + filler[rng.Below(10)] + " " + kClassKeywords[c] + " " +
              filler[rng.Below(10)] + " ";
      std::size_t b = text.size();
      text += d2 + " .";
      corpus::PairInstance p;
      p.sentence_id = sid;
      p.pair_id = sid + ".p0";
      p.sentence_text = text;
      p.e1 = SynthMention(sid, 0, d1, a);
      p.e2 = SynthMention(sid, 1, d2, b);
      p.label = corpus::kAllLabels[c];
      out.push_back(std::move(p));
    }
  }
  return out;
}

inline std::string ChemClassId(std::size_t c, int side) {
  return "SYN" + std::to_string(c) + (side == 0 ? "A" : "B");
}

inline std::vector<corpus::PairInstance> ChemOnlyCorpus(std::size_t per_class) {
  const std::string text = "the drug was given with the other drug .";
  std::vector<corpus::PairInstance> out;
  for (std::size_t i = 0; i < per_class; ++i) {
    for (std::size_t c = 0; c < corpus::kNumLabels; ++c) {
      std::string sid = "chem.s" + std::to_string(out.size());
      corpus::PairInstance p;
      p.sentence_id = sid;
      p.pair_id = sid + ".p0";
      p.sentence_text = text;
      p.e1 = SynthMention(sid, 0, "drug", 4);
      p.e2 = SynthMention(sid, 1, "drug", text.rfind("drug"));
      p.e1.drug_id = ChemClassId(c, 0);
      p.e2.drug_id = ChemClassId(c, 1);
      p.label = corpus::kAllLabels[c];
      out.push_back(std::move(p));
    }
  }
  return out;
}

// Two Gaussian vectors per class, one per mention side.
inline std::vector<chemvae::ChemEmbedding> ChemClassEmbeddings(std::size_t dim,
                                                               std::uint64_t seed) {
  nn::Rng rng(seed);
  std::vector<chemvae::ChemEmbedding> out;
  for (std::size_t c = 0; c < corpus::kNumLabels; ++c) {
    for (int side = 0; side < 2; ++side) {
      chemvae::ChemEmbedding e;
      e.drug_id = ChemClassId(c, side);
      e.vector.resize(dim);
      for (double& v : e.vector) v = rng.Normal();
      out.push_back(std::move(e));
    }
  }
  return out;
}

inline std::vector<std::string> Texts(const std::vector<corpus::PairInstance>& instances) {
  std::vector<std::string> out;
  for (const auto& p : instances) out.push_back(p.sentence_text);
  return out;
}

// 40 instances at batch 8 give 5 steps per epoch; 60 epochs = 300 steps.
inline train::TrainConfig TinyTrainConfig(ddi::Mode mode) {
  train::TrainConfig c;
  c.max_seq_len = 32;
  c.batch_size = 8;
  c.lr = 3e-3;
  c.dropout = 0.0;
  c.epochs = 60;
  c.seed = 17;
  c.mode = mode;
  c.d_model = 16;
  c.n_layers = 1;
  c.n_heads = 2;
  c.ff_dim = 32;
  c.fusion_dim = 8;
  c.vocab_target = 200;
  c.dev_fraction = 0.0;
  c.max_steps = 300;
  return c;
}

}  // namespace bcddi::testing

#endif  // BCDDI_TESTS_SUPPORT_SYNTHETIC_H_
