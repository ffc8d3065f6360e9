// SPDX-License-Identifier: Apache-2.0
//
// bcddi: command-line pipeline.
//
//   prepare    corpus XML + lexicon -> instances.jsonl, stats, coverage
//   train-vae  SMILES list -> VAE checkpoint
//   embed      VAE checkpoint + lexicon -> chemical vectors TSV
//   train      instances -> relation classifier checkpoint
//   eval       checkpoint + instances -> report (text + JSON)
//   predict    checkpoint + instances -> one record per pair
//   compare    two JSON reports -> F1 deltas
//
// Exit status: 0 success, 1 file or environment problem, 2 invalid input,
// invalid configuration or divergence.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "bcddi/chemvae.h"
#include "bcddi/corpus.h"
#include "bcddi/errors.h"
#include "bcddi/eval.h"
#include "bcddi/kv.h"
#include "bcddi/lexicon.h"
#include "bcddi/nn/checkpoint.h"
#include "bcddi/smiles.h"
#include "bcddi/text.h"
#include "bcddi/train.h"

namespace {

using namespace bcddi;

void Log(const std::string& msg) { std::cerr << msg << '\n'; }

std::ofstream OpenOut(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  return out;
}

void WriteText(const std::string& path, const std::string& text) {
  std::ofstream out = OpenOut(path);
  out << text;
  out.close();
  if (!out) throw IoError("failed writing '" + path + "'");
}

std::string ReadText(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

// Config file values first, then explicitly given flags.
template <typename T>
void Override(kv::KeyValues& values, const std::string& key, const std::optional<T>& flag) {
  if (!flag.has_value()) return;
  if constexpr (std::is_same_v<T, double>) {
    values[key] = text::FormatDouble(*flag);
  } else if constexpr (std::is_same_v<T, std::string>) {
    values[key] = *flag;
  } else {
    values[key] = std::to_string(*flag);
  }
}

kv::KeyValues ReadConfig(const std::string& path) {
  return path.empty() ? kv::KeyValues{} : kv::ReadFile(path);
}

// ------------------------------------------------------------------ prepare

struct PrepareArgs {
  std::string corpus, lexicon, out;
};

int RunPrepare(const PrepareArgs& a) {
  lexicon::DrugLexicon lex = lexicon::DrugLexicon::LoadFile(a.lexicon);
  if (lex.duplicate_warnings() > 0) {
    Log("warning: " + std::to_string(lex.duplicate_warnings()) +
        " duplicate lexicon names ignored");
  }
  corpus::CorpusParseResult parsed = corpus::ParseCorpusDirectory(a.corpus);
  if (!parsed.failures.empty()) {
    Log("failed to parse " + std::to_string(parsed.failures.size()) + " file(s):");
    for (const auto& [file, msg] : parsed.failures) Log("  " + file + ": " + msg);
    return 2;
  }
  std::size_t rejected = 0;
  std::vector<corpus::PairInstance> instances = corpus::MakeInstances(parsed.documents, &rejected);
  if (rejected > 0) {
    Log("warning: skipped " + std::to_string(rejected) + " pair(s) with coinciding mentions");
  }
  lexicon::AttachDrugIds(instances, lex);
  std::filesystem::create_directories(a.out);
  const std::string dir = a.out + "/";
  corpus::WriteInstancesFile(dir + "instances.jsonl", instances);
  WriteText(dir + "stats.json",
            corpus::StatsToJson(corpus::ComputeStats(instances, parsed.documents)));
  lexicon::CoverageReport cov = lexicon::ComputeCoverage(instances, lex);
  WriteText(dir + "coverage.json", lexicon::CoverageToJson(cov));
  std::ofstream misses = OpenOut(dir + "misses.txt");
  lexicon::WriteMissList(misses, cov);
  Log("prepared " + std::to_string(instances.size()) + " pairs from " +
      std::to_string(parsed.documents.size()) + " documents; normalized " +
      std::to_string(cov.n_normalized) + "/" + std::to_string(cov.n_unique) + " drug names");
  return 0;
}

// ---------------------------------------------------------------- train-vae

struct VaeArgs {
  std::string smiles, out, config;
  std::optional<std::size_t> epochs, batch_size, max_len, latent_dim, encoder_hidden,
      decoder_hidden, gru_layers;
  std::optional<double> lr, clip_norm, kl_anneal_fraction, init_std;
  std::optional<std::uint64_t> seed;
};

std::vector<std::string> ReadSmilesList(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open SMILES file '" + path + "'");
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    out.push_back(line.substr(0, line.find_first_of(" \t")));
  }
  return out;
}

int RunTrainVae(const VaeArgs& a) {
  kv::KeyValues file = ReadConfig(a.config);
  chemvae::ChemVaeConfig defaults;
  defaults.vocab_size = 2;
  kv::KeyValues model = defaults.ToKeyValues();
  chemvae::VaeTrainOptions opt;
  kv::KeyValues train = {{"epochs", std::to_string(opt.epochs)},
                         {"batch_size", std::to_string(opt.batch_size)},
                         {"lr", text::FormatDouble(opt.lr)},
                         {"clip_norm", text::FormatDouble(opt.clip_norm)},
                         {"kl_anneal_fraction", text::FormatDouble(opt.kl_anneal_fraction)},
                         {"seed", std::to_string(opt.seed)}};
  for (const auto& [k, v] : file) {
    if (model.contains(k) && k != "vocab_size") {
      model[k] = v;
    } else if (train.contains(k)) {
      train[k] = v;
    } else {
      throw ConfigError("unknown VAE option '" + k + "' in " + a.config);
    }
  }
  Override(model, "max_len", a.max_len);
  Override(model, "latent_dim", a.latent_dim);
  Override(model, "encoder_hidden", a.encoder_hidden);
  Override(model, "decoder_hidden", a.decoder_hidden);
  Override(model, "gru_layers", a.gru_layers);
  Override(model, "init_std", a.init_std);
  Override(train, "epochs", a.epochs);
  Override(train, "batch_size", a.batch_size);
  Override(train, "lr", a.lr);
  Override(train, "clip_norm", a.clip_norm);
  Override(train, "kl_anneal_fraction", a.kl_anneal_fraction);
  Override(train, "seed", a.seed);

  std::vector<std::string> smiles_list = ReadSmilesList(a.smiles);
  smiles::SmilesVocab vocab = smiles::SmilesVocab::Build(smiles_list);
  model["vocab_size"] = std::to_string(vocab.size());
  chemvae::ChemVaeConfig cfg = chemvae::ChemVaeConfig::FromKeyValues(model);
  opt.epochs = kv::GetSize(train, "epochs");
  opt.batch_size = kv::GetSize(train, "batch_size");
  opt.lr = kv::GetDouble(train, "lr");
  opt.clip_norm = kv::GetDouble(train, "clip_norm");
  opt.kl_anneal_fraction = kv::GetDouble(train, "kl_anneal_fraction");
  opt.seed = kv::GetU64(train, "seed");

  Log("training VAE on " + std::to_string(smiles_list.size()) + " SMILES, vocabulary " +
      std::to_string(vocab.size()));
  chemvae::VaeTrainResult r = chemvae::TrainVae(smiles_list, vocab, cfg, opt);
  nn::SaveCheckpoint(r.store, a.out);
  kv::WriteFile(a.out + ".cfg", cfg.ToKeyValues());
  std::ofstream vocab_out = OpenOut(a.out + ".vocab");
  vocab.Save(vocab_out);
  vocab_out.close();
  std::ofstream trace = OpenOut(a.out + ".trace.tsv");
  trace << "step\ttotal\trecon\tkl\tkl_weight\n";
  for (const chemvae::VaeStepStats& s : r.trace) {
    trace << s.step << '\t' << text::FormatDouble(s.total) << '\t' << text::FormatDouble(s.recon)
          << '\t' << text::FormatDouble(s.kl) << '\t' << text::FormatDouble(s.kl_weight) << '\n';
  }
  chemvae::Reconstruction rec = chemvae::Reconstruct(r.store, cfg, vocab, smiles_list);
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "steps %zu  final loss %.4f  reconstruction token accuracy %.4f  exact %zu/%zu",
                r.trace.size(), r.trace.empty() ? 0.0 : r.trace.back().total,
                rec.token_accuracy, rec.exact_matches, smiles_list.size());
  Log(buf);
  return 0;
}

// -------------------------------------------------------------------- embed

struct EmbedArgs {
  std::string ckpt, lexicon, out;
};

int RunEmbed(const EmbedArgs& a) {
  nn::ParamStore store = nn::LoadCheckpoint(a.ckpt);
  chemvae::ChemVaeConfig cfg = chemvae::ChemVaeConfig::FromKeyValues(kv::ReadFile(a.ckpt + ".cfg"));
  std::ifstream vin(a.ckpt + ".vocab");
  if (!vin) throw IoError("cannot open '" + a.ckpt + ".vocab'");
  smiles::SmilesVocab vocab = smiles::SmilesVocab::Load(vin);
  lexicon::DrugLexicon lex = lexicon::DrugLexicon::LoadFile(a.lexicon);
  std::vector<chemvae::ChemEmbedding> emb = chemvae::EmbedDrugs(lex, store, cfg, vocab);
  chemvae::WriteEmbeddingsFile(a.out, emb);
  Log("wrote " + std::to_string(emb.size()) + " embeddings of dimension " +
      std::to_string(cfg.latent_dim));
  return 0;
}

// -------------------------------------------------------------------- train

struct TrainArgs {
  std::string instances, embeddings, word_vectors, out, config;
  std::optional<std::string> mode;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> epochs, batch_size, max_seq_len, d_model, n_layers, n_heads, ff_dim,
      fusion_dim, vocab_target, max_steps;
  std::optional<double> lr, dropout, dev_fraction, clip_norm;
  bool zero_chem = false;
};

std::optional<chemvae::ChemLookup> MakeLookup(const std::vector<chemvae::ChemEmbedding>& emb,
                                              const std::string& word_vectors,
                                              std::size_t fallback_dim) {
  std::optional<chemvae::WordVectors> words;
  if (!word_vectors.empty()) words = chemvae::ReadWordVectorsFile(word_vectors);
  if (emb.empty() && !words.has_value()) return std::nullopt;
  std::size_t dim = emb.empty() ? fallback_dim : emb.front().vector.size();
  return chemvae::ChemLookup(dim, emb, std::move(words));
}

int RunTrain(const TrainArgs& a) {
  kv::KeyValues values = ReadConfig(a.config);
  Override(values, "mode", a.mode);
  Override(values, "seed", a.seed);
  Override(values, "epochs", a.epochs);
  Override(values, "batch_size", a.batch_size);
  Override(values, "max_seq_len", a.max_seq_len);
  Override(values, "d_model", a.d_model);
  Override(values, "n_layers", a.n_layers);
  Override(values, "n_heads", a.n_heads);
  Override(values, "ff_dim", a.ff_dim);
  Override(values, "fusion_dim", a.fusion_dim);
  Override(values, "vocab_target", a.vocab_target);
  Override(values, "max_steps", a.max_steps);
  Override(values, "lr", a.lr);
  Override(values, "dropout", a.dropout);
  Override(values, "dev_fraction", a.dev_fraction);
  Override(values, "clip_norm", a.clip_norm);
  if (a.zero_chem) values["zero_chem"] = "1";
  train::TrainConfig cfg = train::TrainConfig::FromKeyValues(values);

  std::vector<chemvae::ChemEmbedding> emb;
  if (!a.embeddings.empty()) emb = chemvae::ReadEmbeddingsFile(a.embeddings);
  std::optional<chemvae::ChemLookup> chem;
  if (cfg.mode == ddi::Mode::kFused) {
    if (a.embeddings.empty()) throw ConfigError("--mode fused requires --embeddings");
    chem = MakeLookup(emb, a.word_vectors, 0);
    if (!chem.has_value()) throw ConfigError("embeddings file '" + a.embeddings + "' is empty");
  }

  std::vector<corpus::PairInstance> instances = corpus::ReadInstancesFile(a.instances);
  std::vector<std::string> texts;
  for (const auto& p : instances) texts.push_back(p.sentence_text);
  ddi::Tokenizer tok = ddi::Tokenizer::Train(texts, cfg.vocab_target);
  Log("training " + std::string(ddi::ModeName(cfg.mode)) + " model on " +
      std::to_string(instances.size()) + " pairs, vocabulary " + std::to_string(tok.size()));
  train::TrainResult r = train::TrainDdi(instances, tok, chem ? &*chem : nullptr, cfg);
  std::ofstream log = OpenOut(a.out + ".log");
  for (const train::EpochStats& e : r.epochs) {
    std::string line = train::EpochLogLine(e);
    log << line << '\n';
    Log(line);
  }
  log.close();
  train::SaveModel(a.out, {r.store, r.model, tok,
                           cfg.mode == ddi::Mode::kFused ? emb : std::vector<chemvae::ChemEmbedding>{}});
  Log("selected epoch " + std::to_string(r.best_epoch) + " (" + std::to_string(r.n_train) +
      " train / " + std::to_string(r.n_dev) + " dev)");
  return 0;
}

// ------------------------------------------------------------ eval / predict

struct ModelArgs {
  std::string ckpt, instances, embeddings, word_vectors;
};

struct LoadedModel {
  train::SavedModel saved;
  std::optional<chemvae::ChemLookup> chem;
  const chemvae::ChemLookup* lookup() const { return chem ? &*chem : nullptr; }
};

LoadedModel Load(const ModelArgs& a) {
  LoadedModel m{train::LoadModel(a.ckpt), std::nullopt};
  if (!a.embeddings.empty()) m.saved.embeddings = chemvae::ReadEmbeddingsFile(a.embeddings);
  if (m.saved.model.mode == ddi::Mode::kFused) {
    m.chem = MakeLookup(m.saved.embeddings, a.word_vectors, m.saved.model.chem_dim);
    if (!m.chem.has_value()) m.chem = chemvae::ChemLookup(m.saved.model.chem_dim, {});
  }
  return m;
}

struct EvalArgs {
  ModelArgs model;
  std::string report, style = "per-type", name;
};

int RunEval(const EvalArgs& a) {
  LoadedModel m = Load(a.model);
  std::vector<corpus::PairInstance> instances = corpus::ReadInstancesFile(a.model.instances);
  eval::EvalReport rep = train::EvaluateModel(m.saved.store, m.saved.model, m.saved.tokenizer,
                                              instances, m.lookup());
  std::string name = a.name.empty() ? std::string(ddi::ModeName(m.saved.model.mode)) : a.name;
  std::string embedding = m.saved.model.mode == ddi::Mode::kFused ? "chem" : "none";
  std::vector<eval::ReportRow> rows = {{name, embedding, rep}};
  WriteText(a.report, eval::RenderReport(rows, eval::StyleFromName(a.style)));
  WriteText(a.report + ".json", eval::ReportToJson(rep));
  char buf[120];
  std::snprintf(buf, sizeof buf, "%zu pairs  macro-F1 %.3f  micro-F1 %.3f", rep.n_instances,
                rep.macro_f1_positive, rep.micro_f1_positive);
  Log(buf);
  return 0;
}

struct PredictArgs {
  ModelArgs model;
  std::string out;
};

int RunPredict(const PredictArgs& a) {
  LoadedModel m = Load(a.model);
  std::vector<corpus::PairInstance> instances = corpus::ReadInstancesFile(a.model.instances);
  std::vector<ddi::Prediction> preds = train::PredictAll(
      m.saved.store, m.saved.model, m.saved.tokenizer, instances, m.lookup());
  std::ofstream out = OpenOut(a.out);
  for (std::size_t i = 0; i < preds.size(); ++i) {
    out << train::PredictionLine(instances[i], preds[i]) << '\n';
  }
  out.close();
  if (!out) throw IoError("failed writing '" + a.out + "'");
  Log("wrote " + std::to_string(preds.size()) + " predictions");
  return 0;
}

struct CompareArgs {
  std::string a, b, out;
};

int RunCompare(const CompareArgs& c) {
  eval::EvalReport a = eval::ReportFromJson(ReadText(c.a));
  eval::EvalReport b = eval::ReportFromJson(ReadText(c.b));
  WriteText(c.out, eval::RenderDelta(eval::CompareRuns(a, b)));
  return 0;
}

void AddModelOptions(CLI::App* cmd, ModelArgs& m) {
  cmd->add_option("--ckpt", m.ckpt, "Classifier checkpoint (sidecars .cfg, .vocab, .emb.tsv)")
      ->required();
  cmd->add_option("--instances", m.instances, "Instances JSONL")->required();
  cmd->add_option("--embeddings", m.embeddings, "Chemical vectors TSV (overrides the sidecar)");
  cmd->add_option("--word-vectors", m.word_vectors, "word2vec text file used at training time");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Drug-drug interaction extraction with chemical structure fusion"};
  app.require_subcommand(1);

  PrepareArgs prep;
  auto* c_prep = app.add_subcommand("prepare", "Parse a corpus directory and normalize drugs");
  c_prep->add_option("--corpus", prep.corpus, "Directory of corpus XML files")->required();
  c_prep->add_option("--lexicon", prep.lexicon, "Lexicon TSV: name, id, SMILES")->required();
  c_prep->add_option("--out", prep.out, "Output directory")->required();

  VaeArgs vae;
  auto* c_vae = app.add_subcommand("train-vae", "Train the SMILES variational autoencoder");
  c_vae->add_option("--smiles", vae.smiles, "SMILES file, one per line")->required();
  c_vae->add_option("--out", vae.out, "Checkpoint path")->required();
  c_vae->add_option("--config", vae.config, "key = value file; flags override it");
  c_vae->add_option("--epochs", vae.epochs);
  c_vae->add_option("--batch-size", vae.batch_size);
  c_vae->add_option("--lr", vae.lr);
  c_vae->add_option("--clip-norm", vae.clip_norm);
  c_vae->add_option("--kl-anneal", vae.kl_anneal_fraction, "Fraction of steps for KL warm-up");
  c_vae->add_option("--seed", vae.seed);
  c_vae->add_option("--max-len", vae.max_len);
  c_vae->add_option("--latent-dim", vae.latent_dim);
  c_vae->add_option("--encoder-hidden", vae.encoder_hidden);
  c_vae->add_option("--decoder-hidden", vae.decoder_hidden);
  c_vae->add_option("--gru-layers", vae.gru_layers);
  c_vae->add_option("--init-std", vae.init_std, "<= 0 selects 1/sqrt(fan_in)");

  EmbedArgs emb;
  auto* c_emb = app.add_subcommand("embed", "Embed every lexicon drug that has SMILES");
  c_emb->add_option("--ckpt", emb.ckpt, "VAE checkpoint")->required();
  c_emb->add_option("--lexicon", emb.lexicon, "Lexicon TSV")->required();
  c_emb->add_option("--out", emb.out, "Output TSV")->required();

  TrainArgs tr;
  auto* c_train = app.add_subcommand("train", "Train the relation classifier");
  c_train->add_option("--instances", tr.instances, "Instances JSONL")->required();
  c_train->add_option("--out", tr.out, "Checkpoint path")->required();
  c_train->add_option("--embeddings", tr.embeddings, "Chemical vectors TSV (fused mode)");
  c_train->add_option("--word-vectors", tr.word_vectors, "word2vec text file for unknown drugs");
  c_train->add_option("--config", tr.config, "key = value file; flags override it");
  c_train->add_option("--mode", tr.mode, "text or fused");
  c_train->add_option("--seed", tr.seed);
  c_train->add_option("--epochs", tr.epochs);
  c_train->add_option("--batch-size", tr.batch_size);
  c_train->add_option("--lr", tr.lr);
  c_train->add_option("--dropout", tr.dropout);
  c_train->add_option("--max-seq-len", tr.max_seq_len);
  c_train->add_option("--d-model", tr.d_model);
  c_train->add_option("--layers", tr.n_layers);
  c_train->add_option("--heads", tr.n_heads);
  c_train->add_option("--ff-dim", tr.ff_dim);
  c_train->add_option("--fusion-dim", tr.fusion_dim);
  c_train->add_option("--vocab-size", tr.vocab_target, "Tokenizer vocabulary target");
  c_train->add_option("--dev-fraction", tr.dev_fraction);
  c_train->add_option("--clip-norm", tr.clip_norm);
  c_train->add_option("--max-steps", tr.max_steps, "0 = no limit");
  c_train->add_flag("--zero-chem", tr.zero_chem, "Start with zero chemical fusion weights");

  EvalArgs ev;
  auto* c_eval = app.add_subcommand("eval", "Score a checkpoint on labelled instances");
  AddModelOptions(c_eval, ev.model);
  c_eval->add_option("--report", ev.report, "Text report path; JSON goes to <path>.json")
      ->required();
  c_eval->add_option("--style", ev.style, "per-type or summary");
  c_eval->add_option("--name", ev.name, "Model name in the report");

  PredictArgs pr;
  auto* c_pred = app.add_subcommand("predict", "Write a label and probabilities per pair");
  AddModelOptions(c_pred, pr.model);
  c_pred->add_option("--out", pr.out, "Output path")->required();

  CompareArgs cmp;
  auto* c_cmp = app.add_subcommand("compare", "F1 deltas between two JSON reports (b - a)");
  c_cmp->add_option("--a", cmp.a, "Baseline report JSON")->required();
  c_cmp->add_option("--b", cmp.b, "Other report JSON")->required();
  c_cmp->add_option("--out", cmp.out, "Output path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*c_prep) return RunPrepare(prep);
    if (*c_vae) return RunTrainVae(vae);
    if (*c_emb) return RunEmbed(emb);
    if (*c_train) return RunTrain(tr);
    if (*c_eval) return RunEval(ev);
    if (*c_pred) return RunPredict(pr);
    if (*c_cmp) return RunCompare(cmp);
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
