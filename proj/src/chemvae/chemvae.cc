// SPDX-License-Identifier: Apache-2.0

#include "bcddi/chemvae.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <type_traits>

#include "bcddi/errors.h"
#include "bcddi/nn/layers.h"
#include "bcddi/nn/ops.h"
#include "bcddi/nn/optim.h"
#include "bcddi/text.h"

namespace bcddi::chemvae {

using nn::Tape;
using nn::Tensor;
using nn::Var;

namespace {

constexpr double kLogvarMin = -10.0;
constexpr double kLogvarMax = 10.0;

std::string ConvName(std::size_t i, const char* what) {
  return "vae.enc.conv" + std::to_string(i) + "." + what;
}

std::string GruName(std::size_t l) { return "vae.dec.gru" + std::to_string(l); }

// Inference only ever reads the store: grad-disabled tapes never take a
// gradient reference, so the const_cast cannot lead to a write.
nn::ParamStore& ReadOnly(const nn::ParamStore& store) {
  return const_cast<nn::ParamStore&>(store);
}

double ParseDouble(std::string_view s, const std::string& what) {
  double v = 0.0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || !std::isfinite(v)) {
    throw FormatError(what + ": bad number '" + std::string(s) + "'");
  }
  return v;
}

std::vector<std::string> Fields(std::string_view line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ' ' || c == '\t' || c == '\r') {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

}  // namespace

void ChemVaeConfig::Validate() const {
  if (latent_dim == 0) throw ConfigError("latent_dim must be positive");
  if (vocab_size < 2) throw ConfigError("vocab_size must be at least 2");
  if (encoder_hidden == 0 || decoder_hidden == 0) {
    throw ConfigError("hidden sizes must be positive");
  }
  if (gru_layers == 0) throw ConfigError("gru_layers must be positive");
  if (conv_widths.size() != 3 || conv_channels.size() != 3) {
    throw ConfigError("the encoder needs exactly three conv widths and channel counts");
  }
  std::size_t len = max_len;
  for (std::size_t w : conv_widths) {
    if (w == 0) throw ConfigError("conv width must be positive");
    if (len < w) {
      throw ConfigError("max_len " + std::to_string(max_len) +
                        " is too short for conv widths " + kv::JoinSizes(conv_widths));
    }
    len -= w - 1;
  }
  for (std::size_t c : conv_channels) {
    if (c == 0) throw ConfigError("conv channels must be positive");
  }
}

std::size_t ChemVaeConfig::ConvOutLen() const {
  std::size_t len = max_len;
  for (std::size_t w : conv_widths) len -= w - 1;
  return len;
}

kv::KeyValues ChemVaeConfig::ToKeyValues() const {
  return {{"max_len", std::to_string(max_len)},
          {"vocab_size", std::to_string(vocab_size)},
          {"latent_dim", std::to_string(latent_dim)},
          {"encoder_hidden", std::to_string(encoder_hidden)},
          {"decoder_hidden", std::to_string(decoder_hidden)},
          {"conv_widths", kv::JoinSizes(conv_widths)},
          {"conv_channels", kv::JoinSizes(conv_channels)},
          {"gru_layers", std::to_string(gru_layers)},
          {"init_std", text::FormatDouble(init_std)},
          {"zero_init_head", zero_init_head ? "1" : "0"}};
}

ChemVaeConfig ChemVaeConfig::FromKeyValues(const kv::KeyValues& v) {
  ChemVaeConfig c;
  c.max_len = kv::GetSize(v, "max_len");
  c.vocab_size = kv::GetSize(v, "vocab_size");
  c.latent_dim = kv::GetSize(v, "latent_dim");
  c.encoder_hidden = kv::GetSize(v, "encoder_hidden");
  c.decoder_hidden = kv::GetSize(v, "decoder_hidden");
  c.conv_widths = kv::GetSizeList(v, "conv_widths");
  c.conv_channels = kv::GetSizeList(v, "conv_channels");
  c.gru_layers = kv::GetSize(v, "gru_layers");
  c.init_std = kv::GetDouble(v, "init_std");
  c.zero_init_head = kv::GetSize(v, "zero_init_head") != 0;
  c.Validate();
  return c;
}

void InitVaeParams(nn::ParamStore& store, const ChemVaeConfig& config, std::uint64_t seed) {
  config.Validate();
  auto sd = [&](std::size_t fan_in) {
    return config.init_std > 0.0 ? config.init_std
                                 : 1.0 / std::sqrt(static_cast<double>(fan_in));
  };
  std::size_t in = config.vocab_size;
  for (std::size_t i = 0; i < 3; ++i) {
    std::size_t out = config.conv_channels[i];
    store.AddGaussian(ConvName(i, "K"), {config.conv_widths[i], in, out},
                      sd(config.conv_widths[i] * in), seed);
    store.AddZeros(ConvName(i, "b"), {out});
    in = out;
  }
  std::size_t flat = config.ConvOutLen() * config.conv_channels[2];
  store.AddGaussian("vae.enc.fc.W", {config.encoder_hidden, flat}, sd(flat), seed);
  store.AddZeros("vae.enc.fc.b", {config.encoder_hidden});
  if (config.zero_init_head) {
    store.AddZeros("vae.enc.out.W", {2 * config.latent_dim, config.encoder_hidden});
  } else {
    store.AddGaussian("vae.enc.out.W", {2 * config.latent_dim, config.encoder_hidden},
                      sd(config.encoder_hidden), seed);
  }
  store.AddZeros("vae.enc.out.b", {2 * config.latent_dim});

  std::size_t hid = config.decoder_hidden;
  store.AddGaussian("vae.dec.init.W", {config.gru_layers * hid, config.latent_dim},
                    sd(config.latent_dim), seed);
  store.AddZeros("vae.dec.init.b", {config.gru_layers * hid});
  for (std::size_t l = 0; l < config.gru_layers; ++l) {
    nn::AddGruParams(store, GruName(l), l == 0 ? config.latent_dim : hid, hid, seed, sd(hid));
  }
  store.AddGaussian("vae.dec.out.W", {config.vocab_size, hid}, sd(hid), seed);
  store.AddZeros("vae.dec.out.b", {config.vocab_size});
}

Posterior Encode(Tape& tape, nn::ParamStore& store, const ChemVaeConfig& config,
                 const Tensor& x) {
  if (x.rows() != config.max_len || x.cols() != config.vocab_size) {
    throw ConfigError("VAE input is " + x.ShapeString() + ", config expects (" +
                      std::to_string(config.max_len) + "," +
                      std::to_string(config.vocab_size) + ")");
  }
  Var h = tape.Constant(x);
  for (std::size_t i = 0; i < 3; ++i) {
    h = nn::Tanh(nn::Conv1d(h, tape.Param(store, ConvName(i, "K")),
                            tape.Param(store, ConvName(i, "b"))));
  }
  h = nn::Tanh(nn::Linear(tape, store, "vae.enc.fc.W", "vae.enc.fc.b", nn::Flatten(h)));
  Var out = nn::Linear(tape, store, "vae.enc.out.W", "vae.enc.out.b", h);
  Posterior q;
  q.mu = nn::SliceCols(out, 0, config.latent_dim);
  q.logvar = nn::Clamp(nn::SliceCols(out, config.latent_dim, config.latent_dim), kLogvarMin,
                       kLogvarMax);
  return q;
}

Var Reparameterize(Tape& tape, const Posterior& q, const Tensor& eps) {
  if (eps.size() != q.mu.value().size()) {
    throw ShapeError("reparameterize: noise " + eps.ShapeString() + " vs mu " +
                     q.mu.value().ShapeString());
  }
  Tensor e(nn::Shape{1, eps.size()}, std::vector<double>(eps.data().begin(), eps.data().end()));
  Var sigma = nn::Exp(nn::Scale(q.logvar, 0.5));
  return nn::Add(q.mu, nn::Mul(sigma, tape.Constant(std::move(e))));
}

Var Decode(Tape& tape, nn::ParamStore& store, const ChemVaeConfig& config, const Var& z) {
  if (z.rows() != 1 || z.cols() != config.latent_dim) {
    throw ShapeError("decode: z has " + std::to_string(z.rows()) + "x" +
                     std::to_string(z.cols()) + " entries, expected latent_dim " +
                     std::to_string(config.latent_dim));
  }
  const std::size_t hid = config.decoder_hidden;
  Var init = nn::Linear(tape, store, "vae.dec.init.W", "vae.dec.init.b", z);
  std::vector<Var> h;
  for (std::size_t l = 0; l < config.gru_layers; ++l) {
    h.push_back(nn::SliceCols(init, l * hid, hid));
  }
  std::vector<Var> top;
  top.reserve(config.max_len);
  for (std::size_t t = 0; t < config.max_len; ++t) {
    Var in = z;
    for (std::size_t l = 0; l < config.gru_layers; ++l) {
      h[l] = nn::GruStep(tape, store, GruName(l), in, h[l]);
      in = h[l];
    }
    top.push_back(in);
  }
  return nn::Linear(tape, store, "vae.dec.out.W", "vae.dec.out.b", nn::ConcatRows(top));
}

Elbo ElboLoss(const smiles::SmilesOneHot& x, const Var& logits, const Posterior& q,
              double kl_weight) {
  std::size_t n = std::min(x.true_len + 1, x.indices.size());
  std::span<const std::size_t> targets(x.indices.data(), n);
  Elbo e;
  e.recon = nn::NllSum(nn::LogSoftmax(logits), targets);
  Var inner = nn::Sub(nn::Sub(nn::AddScalar(q.logvar, 1.0), nn::Mul(q.mu, q.mu)),
                      nn::Exp(q.logvar));
  e.kl = nn::Scale(nn::Sum(inner), -0.5);
  e.total = nn::Add(e.recon, nn::Scale(e.kl, kl_weight));
  return e;
}

Elbo VaeLoss(Tape& tape, nn::ParamStore& store, const ChemVaeConfig& config,
             const smiles::SmilesOneHot& x, const Tensor* eps, double kl_weight) {
  Posterior q = Encode(tape, store, config, x.matrix);
  Var z = eps == nullptr ? q.mu : Reparameterize(tape, q, *eps);
  return ElboLoss(x, Decode(tape, store, config, z), q, kl_weight);
}

VaeTrainResult TrainVae(std::span<const std::string> smiles_list,
                        const smiles::SmilesVocab& vocab, const ChemVaeConfig& config_in,
                        const VaeTrainOptions& options) {
  if (smiles_list.size() < 2) {
    throw ConfigError("VAE training needs at least two SMILES strings, got " +
                      std::to_string(smiles_list.size()));
  }
  if (options.epochs == 0 || options.batch_size == 0 || !(options.lr > 0.0)) {
    throw ConfigError("VAE training needs epochs >= 1, batch_size >= 1 and lr > 0");
  }
  ChemVaeConfig config = config_in;
  config.vocab_size = vocab.size();
  config.Validate();

  std::vector<smiles::SmilesOneHot> data;
  data.reserve(smiles_list.size());
  for (const std::string& s : smiles_list) {
    data.push_back(smiles::EncodeOneHot(s, vocab, config.max_len));
  }

  VaeTrainResult result;
  InitVaeParams(result.store, config, options.seed);
  nn::ParamStore& store = result.store;

  nn::Rng shuffle_rng(options.seed + nn::seed_offset::kShuffle);
  nn::Rng noise_rng(options.seed + nn::seed_offset::kVaeNoise);
  const std::size_t n = data.size();
  const std::size_t per_epoch = (n + options.batch_size - 1) / options.batch_size;
  const std::size_t total_steps = per_epoch * options.epochs;
  const double anneal = options.kl_anneal_fraction * static_cast<double>(total_steps);
  nn::AdamOptions adam;
  adam.lr = options.lr;

  std::vector<std::size_t> order(n);
  std::size_t step = 0;
  for (std::size_t epoch = 0; epoch < options.epochs; ++epoch) {
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    shuffle_rng.Shuffle(order.begin(), order.end());
    for (std::size_t start = 0; start < n; start += options.batch_size, ++step) {
      std::size_t end = std::min(n, start + options.batch_size);
      double inv_b = 1.0 / static_cast<double>(end - start);
      double klw = anneal > 0.0 ? std::min(1.0, static_cast<double>(step) / anneal) : 1.0;
      VaeStepStats stats;
      stats.step = step;
      stats.kl_weight = klw;
      try {
        for (std::size_t k = start; k < end; ++k) {
          Tensor eps(nn::Shape{1, config.latent_dim});
          for (double& v : eps.data()) v = noise_rng.Normal();
          Tape tape;
          Elbo e = VaeLoss(tape, store, config, data[order[k]], &eps, klw);
          stats.total += e.total.value()[0] * inv_b;
          stats.recon += e.recon.value()[0] * inv_b;
          stats.kl += e.kl.value()[0] * inv_b;
          tape.Backward(e.total, inv_b);
        }
        nn::ClipGradNorm(store, options.clip_norm);
      } catch (const NumericError& err) {
        throw DivergenceError("VAE training diverged at step " + std::to_string(step) + ": " +
                              err.what());
      }
      nn::AdamStep(store, adam);
      result.trace.push_back(stats);
    }
  }
  return result;
}

Reconstruction Reconstruct(const nn::ParamStore& store, const ChemVaeConfig& config,
                           const smiles::SmilesVocab& vocab,
                           std::span<const std::string> smiles_list) {
  Reconstruction r;
  std::size_t correct = 0, counted = 0;
  for (const std::string& s : smiles_list) {
    smiles::SmilesOneHot x = smiles::EncodeOneHot(s, vocab, config.max_len);
    Tape tape(false);
    Posterior q = Encode(tape, ReadOnly(store), config, x.matrix);
    Var probs = nn::Softmax(Decode(tape, ReadOnly(store), config, q.mu));
    const Tensor& p = probs.value();
    std::size_t n = std::min(x.true_len + 1, config.max_len);
    for (std::size_t row = 0; row < n; ++row) {
      auto rv = p.row(row);
      std::size_t arg = static_cast<std::size_t>(std::max_element(rv.begin(), rv.end()) -
                                                  rv.begin());
      correct += arg == x.indices[row] ? 1 : 0;
      ++counted;
    }
    r.decoded.push_back(smiles::DecodeGreedy(p, vocab));
    if (r.decoded.back() == s.substr(0, config.max_len)) ++r.exact_matches;
  }
  r.token_accuracy = counted == 0 ? 0.0 : static_cast<double>(correct) / counted;
  return r;
}

std::vector<double> EmbedSmiles(const nn::ParamStore& store, const ChemVaeConfig& config,
                                const smiles::SmilesVocab& vocab, const std::string& smi) {
  smiles::SmilesOneHot x = smiles::EncodeOneHot(smi, vocab, config.max_len);
  Tape tape(false);
  Posterior q = Encode(tape, ReadOnly(store), config, x.matrix);
  const auto& d = q.mu.value().data();
  return std::vector<double>(d.begin(), d.end());
}

std::string_view SourceName(EmbeddingSource s) {
  switch (s) {
    case EmbeddingSource::kVae:
      return "vae";
    case EmbeddingSource::kFallback:
      return "fallback";
    case EmbeddingSource::kImported:
      return "imported";
  }
  return "vae";
}

EmbeddingSource SourceFromName(std::string_view s) {
  if (s == "vae") return EmbeddingSource::kVae;
  if (s == "fallback") return EmbeddingSource::kFallback;
  if (s == "imported") return EmbeddingSource::kImported;
  throw FormatError("unknown embedding source '" + std::string(s) + "'");
}

std::vector<ChemEmbedding> EmbedDrugs(const lexicon::DrugLexicon& lex,
                                      const nn::ParamStore& store,
                                      const ChemVaeConfig& config,
                                      const smiles::SmilesVocab& vocab) {
  std::map<std::string, std::string> smiles_by_id;
  for (const lexicon::DrugEntry& e : lex.entries()) {
    if (e.smiles.has_value()) smiles_by_id.emplace(e.drug_id, *e.smiles);
  }
  std::vector<ChemEmbedding> out;
  for (const auto& [id, smi] : smiles_by_id) {
    out.push_back(ChemEmbedding{id, EmbedSmiles(store, config, vocab, smi),
                                EmbeddingSource::kVae});
  }
  return out;
}

void WriteEmbeddings(std::ostream& out, std::span<const ChemEmbedding> embeddings) {
  for (const ChemEmbedding& e : embeddings) {
    out << e.drug_id << '\t' << SourceName(e.source) << '\t';
    for (std::size_t i = 0; i < e.vector.size(); ++i) {
      if (i) out << ' ';
      out << text::FormatDouble(e.vector[i]);
    }
    out << '\n';
  }
}

std::vector<ChemEmbedding> ReadEmbeddings(std::istream& in) {
  std::vector<ChemEmbedding> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> f = text::Split(line, '\t');
    std::string where = "embedding line " + std::to_string(line_no);
    if (f.size() != 3) throw FormatError(where + ": expected 3 tab-separated fields");
    ChemEmbedding e;
    e.drug_id = f[0];
    e.source = SourceFromName(f[1]);
    for (const std::string& tok : Fields(f[2])) e.vector.push_back(ParseDouble(tok, where));
    if (e.vector.empty()) throw FormatError(where + ": empty vector");
    if (!out.empty() && out.front().vector.size() != e.vector.size()) {
      throw FormatError(where + ": vector length " + std::to_string(e.vector.size()) +
                        " differs from " + std::to_string(out.front().vector.size()));
    }
    out.push_back(std::move(e));
  }
  return out;
}

void WriteEmbeddingsFile(const std::string& path, std::span<const ChemEmbedding> embeddings) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  WriteEmbeddings(out, embeddings);
  if (!out) throw IoError("failed writing '" + path + "'");
}

std::vector<ChemEmbedding> ReadEmbeddingsFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open embeddings '" + path + "'");
  return ReadEmbeddings(in);
}

WordVectors ReadWordVectors(std::istream& in) {
  WordVectors wv;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::vector<std::string> f = Fields(line);
    if (f.empty()) continue;
    std::string where = "word vector line " + std::to_string(line_no);
    if (line_no == 1 && f.size() == 2 &&
        std::all_of(f[0].begin(), f[0].end(), ::isdigit) &&
        std::all_of(f[1].begin(), f[1].end(), ::isdigit)) {
      continue;
    }
    if (f.size() < 2) throw FormatError(where + ": no vector");
    std::vector<double> v;
    for (std::size_t i = 1; i < f.size(); ++i) v.push_back(ParseDouble(f[i], where));
    if (wv.dim == 0) wv.dim = v.size();
    if (v.size() != wv.dim) {
      throw FormatError(where + ": dimension " + std::to_string(v.size()) + " differs from " +
                        std::to_string(wv.dim));
    }
    wv.vectors.emplace(text::CaseFold(f[0]), std::move(v));
  }
  return wv;
}

WordVectors ReadWordVectorsFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open word vectors '" + path + "'");
  return ReadWordVectors(in);
}

ChemLookup::ChemLookup(std::size_t dim, std::vector<ChemEmbedding> embeddings,
                       std::optional<WordVectors> words)
    : dim_(dim), words_(std::move(words)) {
  for (ChemEmbedding& e : embeddings) {
    if (e.vector.size() != dim) {
      throw ShapeError("chemical embedding for " + e.drug_id + " has " +
                       std::to_string(e.vector.size()) + " values, expected " +
                       std::to_string(dim));
    }
    by_id_.emplace(e.drug_id, std::move(e.vector));
  }
  if (words_.has_value() && words_->vectors.empty()) words_.reset();
}

std::string ChemLookup::FallbackName(const corpus::EntityMention& m) {
  return "chem.fallback." + text::CaseFold(text::CollapseWhitespace(m.text));
}

const std::vector<double>* ChemLookup::WordVector(const corpus::EntityMention& m,
                                                  std::vector<double>* scratch) const {
  if (!words_.has_value()) return nullptr;
  std::string key = text::CaseFold(text::CollapseWhitespace(m.text));
  if (auto it = words_->vectors.find(key); it != words_->vectors.end()) return &it->second;
  // Multi-word mentions: mean of the known words.
  scratch->assign(words_->dim, 0.0);
  std::size_t found = 0;
  for (const std::string& w : text::Split(key, ' ')) {
    auto it = words_->vectors.find(w);
    if (it == words_->vectors.end()) continue;
    for (std::size_t i = 0; i < words_->dim; ++i) (*scratch)[i] += it->second[i];
    ++found;
  }
  if (found == 0) return nullptr;
  for (double& v : *scratch) v /= static_cast<double>(found);
  return scratch;
}

EmbeddingSource ChemLookup::SourceFor(const corpus::EntityMention& m) const {
  if (!m.drug_id.empty() && by_id_.contains(m.drug_id)) return EmbeddingSource::kVae;
  std::vector<double> scratch;
  if (WordVector(m, &scratch) != nullptr) return EmbeddingSource::kImported;
  return EmbeddingSource::kFallback;
}

void ChemLookup::AddParams(nn::ParamStore& store,
                           std::span<const corpus::PairInstance> instances,
                           std::uint64_t seed) const {
  for (const corpus::PairInstance& p : instances) {
    for (const corpus::EntityMention* m : {&p.e1, &p.e2}) {
      switch (SourceFor(*m)) {
        case EmbeddingSource::kVae:
          break;
        case EmbeddingSource::kImported:
          if (!store.Contains("chem.import_proj")) {
            store.AddGaussian("chem.import_proj", {dim_, words_->dim}, 0.02, seed);
          }
          break;
        case EmbeddingSource::kFallback: {
          std::string name = FallbackName(*m);
          if (!store.Contains(name)) store.AddGaussian(name, {1, dim_}, 0.02, seed);
          break;
        }
      }
    }
  }
}

namespace {

Tensor FreshInit(const std::string& name, nn::Shape shape, std::uint64_t seed) {
  nn::ParamStore tmp;
  tmp.AddGaussian(name, std::move(shape), 0.02, seed);
  return tmp.Value(name);
}

template <typename Store>
Var LookupParam(Tape& tape, Store& store, const std::string& name, nn::Shape shape,
                std::uint64_t seed) {
  if (!store.Contains(name)) {
    if constexpr (std::is_const_v<Store>) {
      return tape.Constant(FreshInit(name, std::move(shape), seed));
    } else {
      store.AddGaussian(name, std::move(shape), 0.02, seed);
    }
  }
  return tape.Param(store, name);
}

}  // namespace

Var ChemLookup::Vector(Tape& tape, nn::ParamStore& store, const corpus::EntityMention& m,
                       std::uint64_t seed) const {
  EmbeddingSource src = SourceFor(m);
  if (src == EmbeddingSource::kVae) {
    return tape.Constant(Tensor(nn::Shape{1, dim_}, by_id_.at(m.drug_id)));
  }
  if (src == EmbeddingSource::kImported) {
    std::vector<double> scratch;
    const std::vector<double>* w = WordVector(m, &scratch);
    Var proj = LookupParam(tape, store, "chem.import_proj", {dim_, words_->dim}, seed);
    return nn::MatMulNT(tape.Constant(Tensor(nn::Shape{1, w->size()}, *w)), proj);
  }
  return LookupParam(tape, store, FallbackName(m), {1, dim_}, seed);
}

Var ChemLookup::Vector(Tape& tape, const nn::ParamStore& store,
                       const corpus::EntityMention& m, std::uint64_t seed) const {
  EmbeddingSource src = SourceFor(m);
  if (src == EmbeddingSource::kVae) {
    return tape.Constant(Tensor(nn::Shape{1, dim_}, by_id_.at(m.drug_id)));
  }
  if (src == EmbeddingSource::kImported) {
    std::vector<double> scratch;
    const std::vector<double>* w = WordVector(m, &scratch);
    Var proj = LookupParam(tape, store, "chem.import_proj", {dim_, words_->dim}, seed);
    return nn::MatMulNT(tape.Constant(Tensor(nn::Shape{1, w->size()}, *w)), proj);
  }
  return LookupParam(tape, store, FallbackName(m), {1, dim_}, seed);
}

}  // namespace bcddi::chemvae
