// SPDX-License-Identifier: Apache-2.0

#include "bcddi/train.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <set>

#include "bcddi/errors.h"
#include "bcddi/nn/checkpoint.h"
#include "bcddi/nn/ops.h"
#include "bcddi/nn/optim.h"
#include "bcddi/nn/rng.h"
#include "bcddi/text.h"
#include "json.hpp"

namespace bcddi::train {

namespace {

const std::set<std::string>& KnownKeys() {
  static const std::set<std::string> keys = {
      "max_seq_len", "batch_size",   "lr",        "dropout",   "epochs",
      "seed",        "mode",         "d_model",   "n_layers",  "n_heads",
      "ff_dim",      "fusion_dim",   "vocab_target", "dev_fraction", "clip_norm",
      "max_steps",   "zero_chem"};
  return keys;
}

}  // namespace

void TrainConfig::Validate() const {
  if (epochs == 0) throw ConfigError("epochs must be at least 1");
  if (batch_size == 0) throw ConfigError("batch_size must be at least 1");
  if (!(lr > 0.0) || !std::isfinite(lr)) throw ConfigError("lr must be positive");
  if (!(dev_fraction >= 0.0 && dev_fraction < 1.0)) {
    throw ConfigError("dev_fraction must be in [0, 1)");
  }
  if (!(clip_norm > 0.0)) throw ConfigError("clip_norm must be positive");
  if (!(dropout >= 0.0 && dropout < 1.0)) throw ConfigError("dropout must be in [0, 1)");
  if (max_seq_len < 4) throw ConfigError("max_seq_len must be at least 4");
  if (vocab_target < 5) throw ConfigError("vocab_target must be at least 5");
}

kv::KeyValues TrainConfig::ToKeyValues() const {
  return {{"max_seq_len", std::to_string(max_seq_len)},
          {"batch_size", std::to_string(batch_size)},
          {"lr", text::FormatDouble(lr)},
          {"dropout", text::FormatDouble(dropout)},
          {"epochs", std::to_string(epochs)},
          {"seed", std::to_string(seed)},
          {"mode", std::string(ddi::ModeName(mode))},
          {"d_model", std::to_string(d_model)},
          {"n_layers", std::to_string(n_layers)},
          {"n_heads", std::to_string(n_heads)},
          {"ff_dim", std::to_string(ff_dim)},
          {"fusion_dim", std::to_string(fusion_dim)},
          {"vocab_target", std::to_string(vocab_target)},
          {"dev_fraction", text::FormatDouble(dev_fraction)},
          {"clip_norm", text::FormatDouble(clip_norm)},
          {"max_steps", std::to_string(max_steps)},
          {"zero_chem", zero_chem ? "1" : "0"}};
}

TrainConfig TrainConfig::FromKeyValues(const kv::KeyValues& v) {
  for (const auto& [k, _] : v) {
    if (!KnownKeys().contains(k)) throw ConfigError("unknown training option '" + k + "'");
  }
  TrainConfig c;
  auto size = [&](const char* k, std::size_t& out) {
    if (v.contains(k)) out = kv::GetSize(v, k);
  };
  auto real = [&](const char* k, double& out) {
    if (v.contains(k)) out = kv::GetDouble(v, k);
  };
  size("max_seq_len", c.max_seq_len);
  size("batch_size", c.batch_size);
  real("lr", c.lr);
  real("dropout", c.dropout);
  size("epochs", c.epochs);
  if (v.contains("seed")) c.seed = kv::GetU64(v, "seed");
  if (v.contains("mode")) c.mode = ddi::ModeFromName(kv::GetString(v, "mode"));
  size("d_model", c.d_model);
  size("n_layers", c.n_layers);
  size("n_heads", c.n_heads);
  size("ff_dim", c.ff_dim);
  size("fusion_dim", c.fusion_dim);
  size("vocab_target", c.vocab_target);
  real("dev_fraction", c.dev_fraction);
  real("clip_norm", c.clip_norm);
  size("max_steps", c.max_steps);
  if (v.contains("zero_chem")) {
    std::size_t z = kv::GetSize(v, "zero_chem");
    if (z > 1) throw ConfigError("zero_chem must be 0 or 1");
    c.zero_chem = z == 1;
  }
  c.Validate();
  return c;
}

ddi::ModelConfig TrainConfig::ModelFor(std::size_t vocab_size, std::size_t chem_dim) const {
  ddi::ModelConfig m;
  m.encoder.vocab_size = vocab_size;
  m.encoder.d_model = d_model;
  m.encoder.n_layers = n_layers;
  m.encoder.n_heads = n_heads;
  m.encoder.ff_dim = ff_dim;
  m.encoder.max_seq_len = max_seq_len;
  m.encoder.dropout = dropout;
  m.chem_dim = chem_dim;
  m.fusion_dim = fusion_dim;
  m.mode = mode;
  m.seed = seed;
  m.Validate();
  return m;
}

std::pair<std::vector<corpus::PairInstance>, std::vector<corpus::PairInstance>> SplitDev(
    std::span<const corpus::PairInstance> instances, double dev_fraction, std::uint64_t seed) {
  std::vector<std::size_t> order(instances.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::size_t n_dev = 0;
  if (dev_fraction > 0.0 && instances.size() >= 2) {
    n_dev = static_cast<std::size_t>(std::llround(dev_fraction * static_cast<double>(order.size())));
    n_dev = std::clamp<std::size_t>(n_dev, 1, order.size() - 1);
    nn::Rng rng(seed + nn::seed_offset::kDevSplit);
    rng.Shuffle(order.begin(), order.end());
  }
  std::vector<std::size_t> dev_idx(order.begin(), order.begin() + n_dev);
  std::sort(dev_idx.begin(), dev_idx.end());
  std::vector<corpus::PairInstance> train, dev;
  std::size_t d = 0;
  for (std::size_t i = 0; i < instances.size(); ++i) {
    if (d < dev_idx.size() && dev_idx[d] == i) {
      dev.push_back(instances[i]);
      ++d;
    } else {
      train.push_back(instances[i]);
    }
  }
  return {std::move(train), std::move(dev)};
}

TrainResult TrainDdi(std::span<const corpus::PairInstance> instances,
                     const ddi::Tokenizer& tokenizer, const chemvae::ChemLookup* chem,
                     const TrainConfig& config) {
  config.Validate();
  if (instances.empty()) throw ConfigError("no training instances");
  if (config.mode == ddi::Mode::kFused && chem == nullptr) {
    throw ConfigError("fused mode needs chemical embeddings");
  }
  TrainResult result;
  result.model = config.ModelFor(tokenizer.size(), chem != nullptr ? chem->dim() : 292);
  const ddi::ModelConfig& mcfg = result.model;

  auto [train_set, dev_set] = SplitDev(instances, config.dev_fraction, config.seed);
  result.n_train = train_set.size();
  result.n_dev = dev_set.size();
  std::vector<ddi::TokenizedInstance> tokens;
  tokens.reserve(train_set.size());
  for (const corpus::PairInstance& p : train_set) {
    tokens.push_back(ddi::Tokenize(p, tokenizer, mcfg.encoder.max_seq_len));
  }

  nn::ParamStore store;
  ddi::InitModelParams(store, mcfg, config.zero_chem);
  if (mcfg.mode == ddi::Mode::kFused) chem->AddParams(store, train_set, mcfg.seed);
  if (store.NumScalars() == 0) throw ConfigError("model has no trainable parameters");
  const chemvae::ChemLookup* lookup = mcfg.mode == ddi::Mode::kFused ? chem : nullptr;

  nn::Rng shuffle_rng(config.seed + nn::seed_offset::kShuffle);
  nn::Rng dropout_rng(config.seed + nn::seed_offset::kDropout);
  nn::AdamOptions adam;
  adam.lr = config.lr;

  const std::size_t n = train_set.size();
  std::vector<std::size_t> order(n);
  std::size_t step = 0;
  std::optional<double> best_f1;
  bool stop = false;
  for (std::size_t epoch = 1; epoch <= config.epochs && !stop; ++epoch) {
    auto t0 = std::chrono::steady_clock::now();
    std::iota(order.begin(), order.end(), std::size_t{0});
    shuffle_rng.Shuffle(order.begin(), order.end());
    double loss_sum = 0.0;
    std::size_t loss_count = 0;
    for (std::size_t start = 0; start < n; start += config.batch_size) {
      if (config.max_steps != 0 && step >= config.max_steps) {
        stop = true;
        break;
      }
      std::size_t end = std::min(n, start + config.batch_size);
      double inv_b = 1.0 / static_cast<double>(end - start);
      double batch_loss = 0.0;
      try {
        for (std::size_t k = start; k < end; ++k) {
          std::size_t i = order[k];
          nn::Tape tape;
          nn::Var probs = ddi::Forward(tape, store, mcfg, train_set[i], tokens[i], lookup,
                                       &dropout_rng, true);
          std::size_t target = static_cast<std::size_t>(train_set[i].label);
          nn::Var loss = nn::CrossEntropy(probs, std::span(&target, 1));
          batch_loss += loss.value()[0] * inv_b;
          tape.Backward(loss, inv_b);
        }
        nn::ClipGradNorm(store, config.clip_norm);
      } catch (const NumericError& e) {
        throw DivergenceError("training diverged at step " + std::to_string(step) + ": " +
                              e.what());
      }
      if (!std::isfinite(batch_loss)) {
        throw DivergenceError("training diverged at step " + std::to_string(step) +
                              ": non-finite loss");
      }
      nn::AdamStep(store, adam);
      result.step_losses.push_back(batch_loss);
      loss_sum += batch_loss * static_cast<double>(end - start);
      loss_count += end - start;
      ++step;
    }
    if (loss_count == 0) break;  // step budget exhausted at an epoch boundary

    EpochStats stats;
    stats.epoch = epoch;
    stats.train_loss = loss_sum / static_cast<double>(loss_count);
    stats.steps = step;
    bool better = true;
    if (!dev_set.empty()) {
      double f1 = EvaluateModel(store, mcfg, tokenizer, dev_set, lookup).macro_f1_positive;
      stats.dev_macro_f1 = f1;
      better = !best_f1.has_value() || f1 >= *best_f1;
      if (better) best_f1 = f1;
    }
    if (better) {
      result.store = store.CloneValues();
      result.best_epoch = epoch;
    }
    stats.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    result.epochs.push_back(stats);
  }
  return result;
}

std::vector<ddi::Prediction> PredictAll(const nn::ParamStore& store,
                                        const ddi::ModelConfig& model,
                                        const ddi::Tokenizer& tokenizer,
                                        std::span<const corpus::PairInstance> instances,
                                        const chemvae::ChemLookup* chem) {
  std::vector<ddi::Prediction> out;
  out.reserve(instances.size());
  for (const corpus::PairInstance& p : instances) {
    out.push_back(ddi::Predict(store, model, tokenizer, p, chem));
  }
  return out;
}

eval::EvalReport EvaluateModel(const nn::ParamStore& store, const ddi::ModelConfig& model,
                               const ddi::Tokenizer& tokenizer,
                               std::span<const corpus::PairInstance> instances,
                               const chemvae::ChemLookup* chem) {
  std::vector<corpus::RelationLabel> gold, pred;
  for (const corpus::PairInstance& p : instances) {
    gold.push_back(p.label);
    pred.push_back(ddi::Predict(store, model, tokenizer, p, chem).label);
  }
  return eval::Evaluate(gold, pred);
}

std::string EpochLogLine(const EpochStats& s) {
  nlohmann::ordered_json j;
  j["epoch"] = s.epoch;
  j["train_loss"] = s.train_loss;
  j["dev_macro_f1"] = s.dev_macro_f1.has_value() ? nlohmann::ordered_json(*s.dev_macro_f1)
                                                 : nlohmann::ordered_json(nullptr);
  j["wall_seconds"] = s.wall_seconds;
  j["steps"] = s.steps;
  return j.dump();
}

void SaveModel(const std::string& path, const SavedModel& m) {
  nn::SaveCheckpoint(m.store, path);
  kv::WriteFile(path + ".cfg", m.model.ToKeyValues());
  std::ofstream vocab(path + ".vocab", std::ios::binary);
  if (!vocab) throw IoError("cannot write " + path + ".vocab");
  m.tokenizer.Save(vocab);
  vocab.close();
  if (!vocab) throw IoError("cannot write " + path + ".vocab");
  const std::string emb = path + ".emb.tsv";
  if (!m.embeddings.empty()) {
    chemvae::WriteEmbeddingsFile(emb, m.embeddings);
  } else {
    std::error_code ec;
    std::filesystem::remove(emb, ec);
  }
}

SavedModel LoadModel(const std::string& path) {
  SavedModel m;
  m.store = nn::LoadCheckpoint(path);
  m.model = ddi::ModelConfig::FromKeyValues(kv::ReadFile(path + ".cfg"));
  std::ifstream vocab(path + ".vocab", std::ios::binary);
  if (!vocab) throw IoError("cannot open " + path + ".vocab");
  m.tokenizer = ddi::Tokenizer::Load(vocab);
  if (m.tokenizer.size() != m.model.encoder.vocab_size) {
    throw FormatError(path + ".vocab has " + std::to_string(m.tokenizer.size()) +
                      " tokens but the model expects " +
                      std::to_string(m.model.encoder.vocab_size));
  }
  if (std::filesystem::exists(path + ".emb.tsv")) {
    m.embeddings = chemvae::ReadEmbeddingsFile(path + ".emb.tsv");
  }
  return m;
}

std::string PredictionLine(const corpus::PairInstance& instance, const ddi::Prediction& p) {
  std::string line = instance.sentence_id + "\t" + instance.e1.id + "\t" + instance.e2.id + "\t" +
                     std::string(corpus::LabelName(p.label));
  for (double v : p.probs) line += "\t" + text::FormatDouble(v);
  return line;
}

}  // namespace bcddi::train
