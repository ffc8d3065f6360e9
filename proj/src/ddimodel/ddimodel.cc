// SPDX-License-Identifier: Apache-2.0

#include "bcddi/ddimodel.h"

#include <algorithm>
#include <numeric>

#include "bcddi/errors.h"
#include "bcddi/nn/ops.h"
#include "bcddi/text.h"

namespace bcddi::ddi {

using nn::Tape;
using nn::Tensor;
using nn::Var;

namespace {

constexpr double kInitStd = 0.02;

nn::AttentionConfig BlockConfig(const EncoderConfig& c) {
  return nn::AttentionConfig{c.d_model, c.n_heads, c.ff_dim, c.dropout};
}

std::string LayerPrefix(std::size_t l) { return "enc.l" + std::to_string(l); }

Tensor GaussianInit(const std::string& name, nn::Shape shape, std::uint64_t seed) {
  nn::ParamStore tmp;
  tmp.AddGaussian(name, std::move(shape), kInitStd, seed);
  return tmp.Value(name);
}

nn::ParamStore& ReadOnly(const nn::ParamStore& store) {
  // Only used with grad-disabled tapes, which never write to the store.
  return const_cast<nn::ParamStore&>(store);
}

}  // namespace

std::string_view ModeName(Mode m) { return m == Mode::kFused ? "fused" : "text"; }

Mode ModeFromName(std::string_view s) {
  if (s == "fused") return Mode::kFused;
  if (s == "text" || s == "text_only") return Mode::kTextOnly;
  throw ConfigError("unknown mode '" + std::string(s) + "' (expected text or fused)");
}

void EncoderConfig::Validate() const {
  if (vocab_size < 5) throw ConfigError("encoder vocab_size must cover the special tokens");
  if (n_layers == 0) throw ConfigError("encoder needs at least one layer");
  if (max_seq_len < 4) throw ConfigError("max_seq_len must be at least 4");
  if (ff_dim == 0) throw ConfigError("ff_dim must be positive");
  if (!(dropout >= 0.0 && dropout < 1.0)) throw ConfigError("dropout must be in [0, 1)");
  BlockConfig(*this).Validate();
}

void ModelConfig::Validate() const {
  encoder.Validate();
  if (n_labels != corpus::kNumLabels) {
    throw ConfigError("n_labels must be " + std::to_string(corpus::kNumLabels));
  }
  if (mode == Mode::kFused && (chem_dim == 0 || fusion_dim == 0)) {
    throw ConfigError("fused mode needs positive chem_dim and fusion_dim");
  }
}

kv::KeyValues ModelConfig::ToKeyValues() const {
  return {{"vocab_size", std::to_string(encoder.vocab_size)},
          {"d_model", std::to_string(encoder.d_model)},
          {"n_layers", std::to_string(encoder.n_layers)},
          {"n_heads", std::to_string(encoder.n_heads)},
          {"ff_dim", std::to_string(encoder.ff_dim)},
          {"max_seq_len", std::to_string(encoder.max_seq_len)},
          {"dropout", text::FormatDouble(encoder.dropout)},
          {"n_labels", std::to_string(n_labels)},
          {"chem_dim", std::to_string(chem_dim)},
          {"fusion_dim", std::to_string(fusion_dim)},
          {"mode", std::string(ModeName(mode))},
          {"seed", std::to_string(seed)}};
}

ModelConfig ModelConfig::FromKeyValues(const kv::KeyValues& v) {
  ModelConfig c;
  c.encoder.vocab_size = kv::GetSize(v, "vocab_size");
  c.encoder.d_model = kv::GetSize(v, "d_model");
  c.encoder.n_layers = kv::GetSize(v, "n_layers");
  c.encoder.n_heads = kv::GetSize(v, "n_heads");
  c.encoder.ff_dim = kv::GetSize(v, "ff_dim");
  c.encoder.max_seq_len = kv::GetSize(v, "max_seq_len");
  c.encoder.dropout = kv::GetDouble(v, "dropout");
  c.n_labels = kv::GetSize(v, "n_labels");
  c.chem_dim = kv::GetSize(v, "chem_dim");
  c.fusion_dim = kv::GetSize(v, "fusion_dim");
  c.mode = ModeFromName(kv::GetString(v, "mode"));
  c.seed = kv::GetU64(v, "seed");
  c.Validate();
  return c;
}

TokenizedInstance Tokenize(const corpus::PairInstance& inst, const Tokenizer& tokenizer,
                           std::size_t max_seq_len) {
  if (max_seq_len < 4) throw ConfigError("max_seq_len must be at least 4");
  const std::size_t bounds[] = {inst.e1.char_start, inst.e1.char_end, inst.e2.char_start,
                                inst.e2.char_end};
  std::vector<Token> toks = tokenizer.Encode(inst.sentence_text, bounds);

  auto range_of = [&](const corpus::EntityMention& m) {
    std::size_t first = toks.size(), last = 0;
    for (std::size_t i = 0; i < toks.size(); ++i) {
      if (toks[i].char_start < m.char_end && m.char_start < toks[i].char_end) {
        first = std::min(first, i);
        last = i;
      }
    }
    if (first == toks.size()) {
      throw TokenizationError("mention " + m.id + " ('" + m.text + "') in " +
                              inst.sentence_id + " has no tokens");
    }
    return std::make_pair(first, last);
  };
  auto r1 = range_of(inst.e1);
  auto r2 = range_of(inst.e2);
  if (r2.first <= r1.second) {
    throw TokenizationError("mentions " + inst.e1.id + " and " + inst.e2.id +
                            " share tokens in " + inst.sentence_id);
  }

  const std::size_t window = max_seq_len - 2;
  std::size_t start = 0, end = toks.size();
  TokenizedInstance out;
  if (toks.size() > window) {
    if (r2.second - r1.first + 1 > window) {
      throw TruncationError("mentions in " + inst.sentence_id + " span " +
                              std::to_string(r2.second - r1.first + 1) +
                              " tokens, more than max_seq_len allows");
    }
    start = r2.second < window ? 0 : r2.second + 1 - window;
    end = start + window;
    out.truncated = true;
  }
  out.token_ids.push_back(kClsId);
  out.token_char_spans.emplace_back(0, 0);
  for (std::size_t i = start; i < end; ++i) {
    out.token_ids.push_back(toks[i].id);
    out.token_char_spans.emplace_back(toks[i].char_start, toks[i].char_end);
  }
  std::size_t sentence_end = text::DecodeUtf8(inst.sentence_text).size();
  out.token_ids.push_back(kSepId);
  out.token_char_spans.emplace_back(sentence_end, sentence_end);
  // +1 for [CLS]
  out.e1_range = {r1.first - start + 1, r1.second - start + 1};
  out.e2_range = {r2.first - start + 1, r2.second - start + 1};
  out.label = inst.label;
  return out;
}

void InitEncoderParams(nn::ParamStore& store, const EncoderConfig& config, std::uint64_t seed) {
  config.Validate();
  store.AddGaussian("enc.tok_emb", {config.vocab_size, config.d_model}, kInitStd, seed);
  store.AddGaussian("enc.pos_emb", {config.max_seq_len, config.d_model}, kInitStd, seed);
  for (std::size_t l = 0; l < config.n_layers; ++l) {
    nn::AddAttentionParams(store, LayerPrefix(l), BlockConfig(config), seed);
  }
  store.AddConstant("enc.ln_f.g", {config.d_model}, 1.0);
  store.AddZeros("enc.ln_f.b", {config.d_model});
}

void InitModelParams(nn::ParamStore& store, const ModelConfig& config, bool zero_chem) {
  config.Validate();
  const std::size_t d = config.encoder.d_model, n = config.n_labels;
  const std::uint64_t seed = config.seed;
  InitEncoderParams(store, config.encoder, seed);
  store.AddGaussian("head.W0", {d, d}, kInitStd, seed);
  store.AddZeros("head.b0", {d});
  store.AddGaussian("head.Wshared", {d, d}, kInitStd, seed);
  store.AddZeros("head.bshared", {d});
  if (config.mode == Mode::kTextOnly) {
    store.AddGaussian("head.W3", {n, 3 * d}, kInitStd, seed);
    store.AddZeros("head.b3", {n});
    return;
  }
  const std::size_t f = config.fusion_dim;
  Tensor text_block = GaussianInit("head.W3", {n, 3 * d}, seed);
  Tensor chem_block = GaussianInit("head.W3f", {n, f}, seed);
  Tensor w3f(nn::Shape{n, 3 * d + f});
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < 3 * d; ++c) w3f.at(r, c) = text_block.at(r, c);
    for (std::size_t c = 0; c < f; ++c) w3f.at(r, 3 * d + c) = zero_chem ? 0.0 : chem_block.at(r, c);
  }
  store.Add("head.W3f", std::move(w3f));
  store.AddZeros("head.b3f", {n});
  if (zero_chem) {
    store.AddZeros("head.Wc", {f, 2 * config.chem_dim});
  } else {
    store.AddGaussian("head.Wc", {f, 2 * config.chem_dim}, kInitStd, seed);
  }
  store.AddZeros("head.bc", {f});
}

Var EncodeText(Tape& tape, nn::ParamStore& store, const EncoderConfig& config,
               std::span<const std::size_t> ids, nn::Rng* rng, bool train) {
  if (ids.empty()) throw TokenizationError("cannot encode an empty token sequence");
  if (ids.size() > config.max_seq_len) {
    throw TokenizationError("sequence of " + std::to_string(ids.size()) +
                            " tokens exceeds max_seq_len " + std::to_string(config.max_seq_len));
  }
  for (std::size_t id : ids) {
    if (id >= config.vocab_size) {
      throw VocabError("token id " + std::to_string(id) + " outside vocabulary of " +
                       std::to_string(config.vocab_size));
    }
  }
  std::vector<std::size_t> pos(ids.size());
  std::iota(pos.begin(), pos.end(), std::size_t{0});
  Var x = nn::Add(nn::GatherRows(tape, store, "enc.tok_emb", ids),
                  nn::GatherRows(tape, store, "enc.pos_emb", pos));
  x = nn::Dropout(x, config.dropout, rng, train);
  nn::AttentionConfig block = BlockConfig(config);
  for (std::size_t l = 0; l < config.n_layers; ++l) {
    x = nn::AttentionBlock(tape, store, LayerPrefix(l), x, block, rng, train);
  }
  return nn::LayerNorm(x, tape.Param(store, "enc.ln_f.g"), tape.Param(store, "enc.ln_f.b"));
}

Var PoolEntity(Tape& tape, nn::ParamStore& store, const Var& h, std::size_t a, std::size_t b) {
  if (a > b || b >= h.rows()) {
    throw RangeError("entity range [" + std::to_string(a) + ", " + std::to_string(b) +
                     "] invalid for " + std::to_string(h.rows()) + " hidden states");
  }
  Var mean = nn::MeanRows(nn::SliceRows(h, a, b - a + 1));
  return nn::Linear(tape, store, "head.Wshared", "head.bshared", nn::Tanh(mean));
}

Var ClsTransform(Tape& tape, nn::ParamStore& store, const Var& h0) {
  return nn::Linear(tape, store, "head.W0", "head.b0", nn::Tanh(h0));
}

Var ClassifyText(Tape& tape, nn::ParamStore& store, const Var& text_features) {
  return nn::Softmax(nn::Linear(tape, store, "head.W3", "head.b3", text_features));
}

Var FuseChem(Tape& tape, nn::ParamStore& store, const Var& c1, const Var& c2,
             std::size_t chem_dim) {
  for (const Var* c : {&c1, &c2}) {
    if (c->rows() != 1 || c->cols() != chem_dim) {
      throw ShapeError("chemical vector has " + std::to_string(c->rows() * c->cols()) +
                       " values, expected " + std::to_string(chem_dim));
    }
  }
  return nn::Linear(tape, store, "head.Wc", "head.bc", nn::ConcatCols({c1, c2}));
}

Var ClassifyFused(Tape& tape, nn::ParamStore& store, const Var& text_features, const Var& chm) {
  return nn::Softmax(
      nn::Linear(tape, store, "head.W3f", "head.b3f", nn::ConcatCols({text_features, chm})));
}

Var HeadForward(Tape& tape, nn::ParamStore& store, const ModelConfig& config, const Var& h,
                std::pair<std::size_t, std::size_t> e1, std::pair<std::size_t, std::size_t> e2,
                const Var* c1, const Var* c2, nn::Rng* rng, bool train) {
  Var h0 = ClsTransform(tape, store, nn::SliceRows(h, 0, 1));
  Var h1 = PoolEntity(tape, store, h, e1.first, e1.second);
  Var h2 = PoolEntity(tape, store, h, e2.first, e2.second);
  Var features = nn::Dropout(nn::ConcatCols({h0, h1, h2}), config.encoder.dropout, rng, train);
  if (config.mode == Mode::kTextOnly) return ClassifyText(tape, store, features);
  if (c1 == nullptr || c2 == nullptr) {
    throw ConfigError("fused mode needs chemical vectors for both drugs");
  }
  return ClassifyFused(tape, store, features, FuseChem(tape, store, *c1, *c2, config.chem_dim));
}

Var Forward(Tape& tape, nn::ParamStore& store, const ModelConfig& config,
            const corpus::PairInstance& instance, const TokenizedInstance& tokens,
            const chemvae::ChemLookup* chem, nn::Rng* rng, bool train) {
  Var h = EncodeText(tape, store, config.encoder, tokens.token_ids, rng, train);
  if (config.mode == Mode::kTextOnly) {
    return HeadForward(tape, store, config, h, tokens.e1_range, tokens.e2_range, nullptr,
                       nullptr, rng, train);
  }
  if (chem == nullptr) throw ConfigError("fused mode needs chemical embeddings");
  if (chem->dim() != config.chem_dim) {
    throw ShapeError("chemical embeddings have " + std::to_string(chem->dim()) +
                     " dimensions, model expects " + std::to_string(config.chem_dim));
  }
  Var c1, c2;
  if (tape.grad_enabled()) {
    c1 = chem->Vector(tape, store, instance.e1, config.seed);
    c2 = chem->Vector(tape, store, instance.e2, config.seed);
  } else {
    c1 = chem->Vector(tape, std::as_const(store), instance.e1, config.seed);
    c2 = chem->Vector(tape, std::as_const(store), instance.e2, config.seed);
  }
  return HeadForward(tape, store, config, h, tokens.e1_range, tokens.e2_range, &c1, &c2, rng,
                     train);
}

corpus::RelationLabel PredictLabel(std::span<const double> probs) {
  if (probs.size() != corpus::kNumLabels) {
    throw ShapeError("expected " + std::to_string(corpus::kNumLabels) + " probabilities, got " +
                     std::to_string(probs.size()));
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < probs.size(); ++i) {
    if (probs[i] > probs[best]) best = i;
  }
  return corpus::kAllLabels[best];
}

Prediction Predict(const nn::ParamStore& store, const ModelConfig& config,
                   const Tokenizer& tokenizer, const corpus::PairInstance& instance,
                   const chemvae::ChemLookup* chem) {
  TokenizedInstance tokens = Tokenize(instance, tokenizer, config.encoder.max_seq_len);
  Tape tape(false);
  Var probs = Forward(tape, ReadOnly(store), config, instance, tokens, chem, nullptr, false);
  Prediction p;
  p.probs.assign(probs.value().data().begin(), probs.value().data().end());
  p.label = PredictLabel(p.probs);
  return p;
}

}  // namespace bcddi::ddi
