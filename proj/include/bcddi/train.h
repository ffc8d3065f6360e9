// SPDX-License-Identifier: Apache-2.0
//
// Supervised training of the relation classifier, model persistence, and
// batch prediction.

#ifndef BCDDI_TRAIN_H_
#define BCDDI_TRAIN_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bcddi/chemvae.h"
#include "bcddi/corpus.h"
#include "bcddi/ddimodel.h"
#include "bcddi/eval.h"
#include "bcddi/kv.h"
#include "bcddi/nn/param_store.h"
#include "bcddi/tokenizer.h"

namespace bcddi::train {

struct TrainConfig {
  std::size_t max_seq_len = 300;
  std::size_t batch_size = 16;
  double lr = 2e-5;
  double dropout = 0.1;
  std::size_t epochs = 5;
  std::uint64_t seed = 0;
  ddi::Mode mode = ddi::Mode::kFused;

  // Model size (desk scale by default).
  std::size_t d_model = 128;
  std::size_t n_layers = 4;
  std::size_t n_heads = 4;
  std::size_t ff_dim = 512;
  std::size_t fusion_dim = 128;

  std::size_t vocab_target = 8000;
  // Share of the training instances held out for model selection; 0 keeps
  // every instance for training and selects the last epoch.
  double dev_fraction = 0.1;
  double clip_norm = 1.0;
  // Stop after this many optimizer steps; 0 means no limit.
  std::size_t max_steps = 0;
  // Start fused models with Wc, bc and the chm columns of W3f at zero.
  bool zero_chem = false;

  // Throws ConfigError.
  void Validate() const;
  kv::KeyValues ToKeyValues() const;
  // Keys not present keep their defaults. Throws ConfigError.
  static TrainConfig FromKeyValues(const kv::KeyValues& values);
  // Model configuration for a tokenizer of `vocab_size` and chemical
  // vectors of `chem_dim` values.
  ddi::ModelConfig ModelFor(std::size_t vocab_size, std::size_t chem_dim) const;
};

struct EpochStats {
  std::size_t epoch = 0;  // 1-based
  double train_loss = 0.0;
  std::optional<double> dev_macro_f1;
  double wall_seconds = 0.0;
  std::size_t steps = 0;  // cumulative
};

struct TrainResult {
  nn::ParamStore store;  // parameters of the selected epoch
  ddi::ModelConfig model;
  std::vector<double> step_losses;  // batch-mean cross-entropy per step
  std::vector<EpochStats> epochs;
  std::size_t best_epoch = 0;
  std::size_t n_train = 0;
  std::size_t n_dev = 0;
};

// Seeded split: returns (train, dev).
std::pair<std::vector<corpus::PairInstance>, std::vector<corpus::PairInstance>> SplitDev(
    std::span<const corpus::PairInstance> instances, double dev_fraction, std::uint64_t seed);

// Mini-batch Adam on cross-entropy, gradients clipped by global norm.
// `chem` is required in fused mode. The selected parameters are those of
// the epoch with the best dev macro-F1 (ties to the later epoch).
// Throws ConfigError (empty input, missing chem) and DivergenceError on a
// non-finite loss or gradient, naming the step.
TrainResult TrainDdi(std::span<const corpus::PairInstance> instances,
                     const ddi::Tokenizer& tokenizer, const chemvae::ChemLookup* chem,
                     const TrainConfig& config);

std::vector<ddi::Prediction> PredictAll(const nn::ParamStore& store,
                                        const ddi::ModelConfig& model,
                                        const ddi::Tokenizer& tokenizer,
                                        std::span<const corpus::PairInstance> instances,
                                        const chemvae::ChemLookup* chem);

eval::EvalReport EvaluateModel(const nn::ParamStore& store, const ddi::ModelConfig& model,
                               const ddi::Tokenizer& tokenizer,
                               std::span<const corpus::PairInstance> instances,
                               const chemvae::ChemLookup* chem);

// One JSON object per line: epoch, train_loss, dev_macro_f1 (null without a
// dev set), wall_seconds, steps.
std::string EpochLogLine(const EpochStats& stats);

// A checkpoint at `path` plus sidecars: path.cfg (model config),
// path.vocab (tokenizer) and, when given, path.emb.tsv (chemical vectors).
struct SavedModel {
  nn::ParamStore store;
  ddi::ModelConfig model;
  ddi::Tokenizer tokenizer;
  std::vector<chemvae::ChemEmbedding> embeddings;
};
void SaveModel(const std::string& path, const SavedModel& model);
// Throws IoError / FormatError / ConfigError.
SavedModel LoadModel(const std::string& path);

// "sentence_id<TAB>e1_id<TAB>e2_id<TAB>label<TAB>p_Mechanism ... p_Negative"
std::string PredictionLine(const corpus::PairInstance& instance, const ddi::Prediction& p);

}  // namespace bcddi::train

#endif  // BCDDI_TRAIN_H_
