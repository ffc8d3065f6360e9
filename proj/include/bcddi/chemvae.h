// SPDX-License-Identifier: Apache-2.0
//
// Variational autoencoder over one-hot SMILES, and the per-drug chemical
// vectors derived from it.
//
// Encoder: three valid conv1d layers (tanh), flatten, a tanh hidden layer
// of width encoder_hidden, then a linear map to 2 * latent_dim values split
// into (mu, logvar). Decoder: z is projected to the initial hidden state of
// a stacked GRU that receives z at every step; a shared linear layer maps
// the top hidden state to per-position logits.

#ifndef BCDDI_CHEMVAE_H_
#define BCDDI_CHEMVAE_H_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bcddi/kv.h"
#include "bcddi/lexicon.h"
#include "bcddi/nn/param_store.h"
#include "bcddi/nn/tape.h"
#include "bcddi/smiles.h"

namespace bcddi::chemvae {

struct ChemVaeConfig {
  std::size_t max_len = 120;
  std::size_t vocab_size = 0;  // taken from the SMILES vocabulary
  std::size_t latent_dim = 292;
  std::size_t encoder_hidden = 200;
  std::size_t decoder_hidden = 500;
  std::vector<std::size_t> conv_widths = {9, 9, 10};
  std::vector<std::size_t> conv_channels = {9, 9, 11};
  std::size_t gru_layers = 3;
  double init_std = 0.02;
  // Zero init of the (mu, logvar) layer, so KL starts at exactly 0.
  bool zero_init_head = true;

  // Throws ConfigError.
  void Validate() const;
  // Rows left after the three convolutions.
  std::size_t ConvOutLen() const;

  kv::KeyValues ToKeyValues() const;
  static ChemVaeConfig FromKeyValues(const kv::KeyValues& values);
};

// Creates every "vae.*" parameter.
void InitVaeParams(nn::ParamStore& store, const ChemVaeConfig& config, std::uint64_t seed);

struct Posterior {
  nn::Var mu;       // [1, latent]
  nn::Var logvar;   // [1, latent], clamped to [-10, 10]
};

// Throws ConfigError when x does not match (max_len, vocab_size).
Posterior Encode(nn::Tape& tape, nn::ParamStore& store, const ChemVaeConfig& config,
                 const nn::Tensor& x);

// z = mu + exp(logvar / 2) * eps.
nn::Var Reparameterize(nn::Tape& tape, const Posterior& q, const nn::Tensor& eps);

// Logits [max_len, vocab_size].
nn::Var Decode(nn::Tape& tape, nn::ParamStore& store, const ChemVaeConfig& config,
               const nn::Var& z);

struct Elbo {
  nn::Var total;
  nn::Var recon;
  nn::Var kl;
};

// recon: negative log-likelihood summed over positions < true_len + 1
// (the characters and one PAD); kl: -1/2 sum(1 + logvar - mu^2 - exp(logvar)).
Elbo ElboLoss(const smiles::SmilesOneHot& x, const nn::Var& logits, const Posterior& q,
              double kl_weight);

// Full forward for one molecule. eps == nullptr means frozen noise (z = mu).
Elbo VaeLoss(nn::Tape& tape, nn::ParamStore& store, const ChemVaeConfig& config,
             const smiles::SmilesOneHot& x, const nn::Tensor* eps, double kl_weight);

struct VaeTrainOptions {
  std::size_t epochs = 100;
  std::size_t batch_size = 16;
  double lr = 1e-3;
  double clip_norm = 1.0;
  // Fraction of all steps over which the KL weight rises linearly 0 -> 1.
  double kl_anneal_fraction = 0.5;
  std::uint64_t seed = 0;
};

struct VaeStepStats {
  std::size_t step = 0;
  double total = 0.0;   // batch means
  double recon = 0.0;
  double kl = 0.0;
  double kl_weight = 0.0;
};

struct VaeTrainResult {
  nn::ParamStore store;
  std::vector<VaeStepStats> trace;
};

// Throws ConfigError for fewer than two SMILES and DivergenceError on a
// non-finite loss.
VaeTrainResult TrainVae(std::span<const std::string> smiles_list,
                        const smiles::SmilesVocab& vocab, const ChemVaeConfig& config,
                        const VaeTrainOptions& options);

// Greedy decoding of mu. Token accuracy counts positions < true_len + 1.
struct Reconstruction {
  std::vector<std::string> decoded;
  double token_accuracy = 0.0;
  std::size_t exact_matches = 0;
};
Reconstruction Reconstruct(const nn::ParamStore& store, const ChemVaeConfig& config,
                           const smiles::SmilesVocab& vocab,
                           std::span<const std::string> smiles_list);

// Posterior mean for one SMILES string.
std::vector<double> EmbedSmiles(const nn::ParamStore& store, const ChemVaeConfig& config,
                                const smiles::SmilesVocab& vocab, const std::string& smi);

enum class EmbeddingSource { kVae, kFallback, kImported };
std::string_view SourceName(EmbeddingSource s);
EmbeddingSource SourceFromName(std::string_view s);

struct ChemEmbedding {
  std::string drug_id;
  std::vector<double> vector;
  EmbeddingSource source = EmbeddingSource::kVae;

  bool operator==(const ChemEmbedding&) const = default;
};

// One embedding per distinct drug_id among lexicon entries with SMILES, in
// drug_id order. Throws EncodeError if a SMILES uses characters outside
// the vocabulary.
std::vector<ChemEmbedding> EmbedDrugs(const lexicon::DrugLexicon& lex,
                                      const nn::ParamStore& store,
                                      const ChemVaeConfig& config,
                                      const smiles::SmilesVocab& vocab);

// "drug_id<TAB>source<TAB>v1 v2 ..." with 17 significant digits.
void WriteEmbeddings(std::ostream& out, std::span<const ChemEmbedding> embeddings);
std::vector<ChemEmbedding> ReadEmbeddings(std::istream& in);
void WriteEmbeddingsFile(const std::string& path, std::span<const ChemEmbedding> embeddings);
std::vector<ChemEmbedding> ReadEmbeddingsFile(const std::string& path);

// word2vec text format: optional "count dim" header, then "word v1 .. vd".
// Keys are case-folded. Throws FormatError on ragged rows.
struct WordVectors {
  std::size_t dim = 0;
  std::map<std::string, std::vector<double>> vectors;
};
WordVectors ReadWordVectors(std::istream& in);
WordVectors ReadWordVectorsFile(const std::string& path);

// Resolves a drug mention to its chemical vector:
//   1. the VAE embedding of its drug_id (constant),
//   2. an imported word vector w mapped through the trainable projection
//      "chem.import_proj" (P w),
//   3. a trainable row "chem.fallback.<case-folded name>" (Gaussian init,
//      std 0.02, seeded by name).
class ChemLookup {
 public:
  ChemLookup() = default;
  ChemLookup(std::size_t dim, std::vector<ChemEmbedding> embeddings,
             std::optional<WordVectors> words = std::nullopt);

  std::size_t dim() const { return dim_; }
  bool has_words() const { return words_.has_value(); }

  EmbeddingSource SourceFor(const corpus::EntityMention& m) const;

  // Creates the trainable parameters the given mentions need.
  void AddParams(nn::ParamStore& store, std::span<const corpus::PairInstance> instances,
                 std::uint64_t seed) const;

  // [1, dim]. With a mutable store gradients reach the projection and
  // fallback rows; a fallback row missing from the store is initialized on
  // the fly (const overload) or created (mutable overload).
  nn::Var Vector(nn::Tape& tape, nn::ParamStore& store, const corpus::EntityMention& m,
                 std::uint64_t seed) const;
  nn::Var Vector(nn::Tape& tape, const nn::ParamStore& store,
                 const corpus::EntityMention& m, std::uint64_t seed) const;

  static std::string FallbackName(const corpus::EntityMention& m);

 private:
  const std::vector<double>* WordVector(const corpus::EntityMention& m,
                                        std::vector<double>* scratch) const;

  std::size_t dim_ = 0;
  std::map<std::string, std::vector<double>> by_id_;
  std::optional<WordVectors> words_;
};

}  // namespace bcddi::chemvae

#endif  // BCDDI_CHEMVAE_H_
