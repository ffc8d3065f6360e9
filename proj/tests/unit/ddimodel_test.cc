// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "gtest/gtest.h"

#include "bcddi/ddimodel.h"
#include "bcddi/errors.h"
#include "bcddi/nn/grad_check.h"
#include "bcddi/nn/ops.h"
#include "bcddi/nn/rng.h"
#include "support/tiny_configs.h"

namespace bcddi::ddi {
namespace {

using bcddi::testing::MakePair;
using bcddi::testing::TinyModelConfig;
using corpus::RelationLabel;

Tokenizer FromVocab(const std::vector<std::string>& pieces) {
  std::stringstream s;
  s << "[PAD]\n[UNK]\n[CLS]\n[SEP]\n";
  for (const auto& p : pieces) s << p << '\n';
  return Tokenizer::Load(s);
}

// Whole-word vocabulary plus a three-piece split for one drug name.
Tokenizer WordTokenizer() {
  return FromVocab({"aspirin", "increases", "the", "effect", "of", "warfarin", ".", "and",
                    "glepa", "##flox", "##acin", "is", "a", "competitive", "inhibitor",
                    "metabolism", "theophylline", "w"});
}

nn::Tensor RandomTensor(nn::Shape shape, nn::Rng& rng, double scale = 1.0) {
  nn::Tensor t(std::move(shape));
  for (double& v : t.data()) v = scale * rng.Normal();
  return t;
}

void SetIdentity(nn::Tensor& w) {
  w.Fill(0.0);
  for (std::size_t i = 0; i < std::min(w.rows(), w.cols()); ++i) w.at(i, i) = 1.0;
}

double RowSum(const nn::Var& v) {
  auto d = v.value().data();
  return std::accumulate(d.begin(), d.end(), 0.0);
}

// ---------------------------------------------------------------- tokenize

TEST(TokenizeTest, SingleWordMentions) {
  Tokenizer tok = WordTokenizer();
  auto inst = MakePair("Aspirin increases the effect of warfarin.", "Aspirin", "warfarin");
  TokenizedInstance t = Tokenize(inst, tok, 300);
  ASSERT_EQ(t.token_ids.size(), 9u);
  EXPECT_EQ(t.token_ids.front(), kClsId);
  EXPECT_EQ(t.token_ids.back(), kSepId);
  EXPECT_EQ(t.e1_range, std::make_pair(std::size_t{1}, std::size_t{1}));
  EXPECT_EQ(t.e2_range, std::make_pair(std::size_t{6}, std::size_t{6}));
  EXPECT_FALSE(t.truncated);
}

TEST(TokenizeTest, SubwordMentionSpansThreeTokens) {
  Tokenizer tok = WordTokenizer();
  auto inst = MakePair("Glepafloxacin is a competitive inhibitor of the metabolism of theophylline.",
                       "Glepafloxacin", "theophylline");
  TokenizedInstance t = Tokenize(inst, tok, 300);
  EXPECT_EQ(t.e1_range, std::make_pair(std::size_t{1}, std::size_t{3}));
  EXPECT_EQ(t.e2_range.first, t.e2_range.second);
  // Every entity token overlaps its mention.
  for (std::size_t i = t.e1_range.first; i <= t.e1_range.second; ++i) {
    EXPECT_LT(t.token_char_spans[i].first, inst.e1.char_end);
    EXPECT_GT(t.token_char_spans[i].second, inst.e1.char_start);
  }
}

TEST(TokenizeTest, MentionInsideWordIsSplitOut) {
  Tokenizer tok = FromVocab({"w", "##arfarin", "warfarin", "and", "aspirin", "x"});
  // "xwarfarin": the boundary at the mention start splits the word.
  auto inst = MakePair("aspirin and xwarfarin", "aspirin", "warfarin");
  TokenizedInstance t = Tokenize(inst, tok, 300);
  EXPECT_EQ(tok.TokenAt(t.token_ids[t.e2_range.first]), "warfarin");
  EXPECT_EQ(t.e2_range.first, t.e2_range.second);
}

TEST(TokenizeTest, WindowSlidesToKeepBothMentions) {
  Tokenizer tok = WordTokenizer();
  std::string text;
  for (int i = 0; i < 400; ++i) text += "the ";
  text += "aspirin and warfarin .";
  auto inst = MakePair(text, "aspirin", "warfarin");
  TokenizedInstance t = Tokenize(inst, tok, 300);
  EXPECT_TRUE(t.truncated);
  ASSERT_EQ(t.token_ids.size(), 300u);
  EXPECT_EQ(t.token_ids.front(), kClsId);
  EXPECT_EQ(t.token_ids.back(), kSepId);
  EXPECT_EQ(tok.TokenAt(t.token_ids[t.e1_range.first]), "aspirin");
  EXPECT_EQ(tok.TokenAt(t.token_ids[t.e2_range.first]), "warfarin");
  EXPECT_EQ(t.e2_range.second, 298u);
}

TEST(TokenizeTest, MentionsTooFarApart) {
  Tokenizer tok = WordTokenizer();
  std::string text = "aspirin ";
  for (int i = 0; i < 20; ++i) text += "the ";
  text += "warfarin";
  auto inst = MakePair(text, "aspirin", "warfarin");
  EXPECT_THROW(Tokenize(inst, tok, 10), TruncationError);
  EXPECT_NO_THROW(Tokenize(inst, tok, 24));
}

TEST(TokenizeTest, EmptyMentionHasNoTokens) {
  Tokenizer tok = WordTokenizer();
  auto inst = MakePair("aspirin and warfarin", "aspirin", "warfarin");
  inst.e1.char_end = inst.e1.char_start;
  EXPECT_THROW(Tokenize(inst, tok, 300), TokenizationError);
}

// ------------------------------------------------------------------ encoder

TEST(EncodeTextTest, ShapeDeterminismAndVocabCheck) {
  ModelConfig cfg = TinyModelConfig(20, Mode::kTextOnly);
  nn::ParamStore store;
  InitModelParams(store, cfg);
  std::vector<std::size_t> ids = {2, 5, 7, 9, 3};
  nn::Tape t1(false), t2(false);
  nn::Var a = EncodeText(t1, store, cfg.encoder, ids, nullptr, false);
  nn::Var b = EncodeText(t2, store, cfg.encoder, ids, nullptr, false);
  EXPECT_EQ(a.rows(), 5u);
  EXPECT_EQ(a.cols(), 8u);
  EXPECT_EQ(a.value().storage(), b.value().storage());
  std::vector<std::size_t> bad = {2, 20, 3};
  nn::Tape t3(false);
  EXPECT_THROW(EncodeText(t3, store, cfg.encoder, bad, nullptr, false), VocabError);
}

TEST(EncodeTextTest, GradCheck) {
  ModelConfig cfg = TinyModelConfig(12, Mode::kTextOnly);
  nn::ParamStore store;
  InitEncoderParams(store, cfg.encoder, 5);
  nn::Rng rng(8);
  // Spread the parameters so the check is not dominated by near-zero entries.
  for (auto& [name, p] : store) {
    if (name.find(".g") == std::string::npos) {
      for (double& v : p.value.data()) v += 0.3 * rng.Normal();
    }
  }
  nn::Tensor probe = RandomTensor({6, 8}, rng);
  std::vector<std::size_t> ids = {2, 4, 5, 11, 7, 3};
  auto loss = [&](nn::Tape& tape, nn::ParamStore& s) {
    nn::Var h = EncodeText(tape, s, cfg.encoder, ids, nullptr, false);
    return nn::Sum(nn::Mul(h, tape.Constant(probe)));
  };
  nn::GradCheckResult r = nn::GradCheck(loss, store);
  EXPECT_GT(r.n_checked, 500u);
  EXPECT_LT(r.max_rel_error, 1e-5) << r.worst_param << "[" << r.worst_index << "]";
}

// -------------------------------------------------------------------- heads

class HeadTest : public ::testing::Test {
 protected:
  void SetUp() override {
    cfg_ = TinyModelConfig(20, Mode::kFused);
    InitModelParams(store_, cfg_);
  }
  ModelConfig cfg_;
  nn::ParamStore store_;
  nn::Rng rng_{4};
};

TEST_F(HeadTest, NoSeparateEntityWeights) {
  for (const std::string& n : store_.Names()) {
    if (!n.starts_with("head.")) continue;
    EXPECT_EQ(n.find("W1"), std::string::npos) << n;
    EXPECT_EQ(n.find("W2"), std::string::npos) << n;
  }
  EXPECT_TRUE(store_.Contains("head.Wshared"));
}

TEST_F(HeadTest, PoolSingletonAndZero) {
  SetIdentity(store_.Value("head.Wshared"));
  nn::Tape tape(false);
  nn::Tensor h = RandomTensor({5, 8}, rng_);
  for (std::size_t c = 0; c < 8; ++c) h.at(3, c) = 0.0;
  nn::Var hv = tape.Constant(h);
  nn::Var p = PoolEntity(tape, store_, hv, 1, 1);
  for (std::size_t c = 0; c < 8; ++c) EXPECT_DOUBLE_EQ(p.value()[c], std::tanh(h.at(1, c)));
  nn::Var z = PoolEntity(tape, store_, hv, 3, 3);
  for (double v : z.value().data()) EXPECT_EQ(v, 0.0);
}

TEST_F(HeadTest, PoolAveragesBeforeTanh) {
  nn::Tape tape(false);
  nn::Tensor h = RandomTensor({5, 8}, rng_);
  nn::Var p = PoolEntity(tape, store_, tape.Constant(h), 1, 3);
  const nn::Tensor& w = store_.Value("head.Wshared");
  for (std::size_t r = 0; r < 8; ++r) {
    double expect = 0.0;
    for (std::size_t c = 0; c < 8; ++c) {
      double mean = (h.at(1, c) + h.at(2, c) + h.at(3, c)) / 3.0;
      expect += w.at(r, c) * std::tanh(mean);
    }
    EXPECT_NEAR(p.value()[r], expect, 1e-15);
  }
}

TEST_F(HeadTest, TiedEntityProjection) {
  nn::Tensor h = RandomTensor({6, 8}, rng_);
  for (std::size_t c = 0; c < 8; ++c) h.at(4, c) = h.at(1, c);
  nn::Tape tape(false);
  nn::Var hv = tape.Constant(h);
  nn::Var p1 = PoolEntity(tape, store_, hv, 1, 1);
  nn::Var p2 = PoolEntity(tape, store_, hv, 4, 4);
  EXPECT_EQ(p1.value().storage(), p2.value().storage());
  store_.Value("head.Wshared").at(0, 0) += 1.0;
  nn::Tape t2(false);
  nn::Var q1 = PoolEntity(t2, store_, t2.Constant(h), 1, 1);
  nn::Var q2 = PoolEntity(t2, store_, t2.Constant(h), 4, 4);
  EXPECT_NE(q1.value()[0], p1.value()[0]);
  EXPECT_EQ(q1.value().storage(), q2.value().storage());
}

TEST_F(HeadTest, PoolRangeErrors) {
  nn::Tape tape(false);
  nn::Var hv = tape.Constant(RandomTensor({5, 8}, rng_));
  EXPECT_THROW(PoolEntity(tape, store_, hv, 3, 2), RangeError);
  EXPECT_THROW(PoolEntity(tape, store_, hv, 4, 5), RangeError);
}

TEST_F(HeadTest, ClsTransformExamples) {
  nn::Tape tape(false);
  nn::Var zero = ClsTransform(tape, store_, tape.Constant(nn::Tensor({1, 8})));
  for (double v : zero.value().data()) EXPECT_EQ(v, 0.0);
  SetIdentity(store_.Value("head.W0"));
  nn::Tensor h0 = RandomTensor({1, 8}, rng_);
  nn::Var out = ClsTransform(tape, store_, tape.Constant(h0));
  for (std::size_t c = 0; c < 8; ++c) EXPECT_DOUBLE_EQ(out.value()[c], std::tanh(h0[c]));
}

TEST_F(HeadTest, ClsAndFuseGradCheck) {
  nn::Tensor h0 = RandomTensor({1, 8}, rng_);
  nn::Tensor c1 = RandomTensor({1, 6}, rng_), c2 = RandomTensor({1, 6}, rng_);
  nn::Tensor probe = RandomTensor({1, 8}, rng_), probe_f = RandomTensor({1, 4}, rng_);
  for (auto name : {"head.W0", "head.Wc"}) {
    for (double& v : store_.Value(name).data()) v = rng_.Normal() * 0.5;
  }
  auto cls = [&](nn::Tape& tape, nn::ParamStore& s) {
    return nn::Sum(nn::Mul(ClsTransform(tape, s, tape.Constant(h0)), tape.Constant(probe)));
  };
  nn::GradCheckResult r = nn::GradCheck(cls, store_, 1e-5, 1e-3, {"head.W0", "head.b0"});
  EXPECT_EQ(r.n_checked, 72u);
  EXPECT_LT(r.max_rel_error, 1e-6) << r.worst_param;
  auto fuse = [&](nn::Tape& tape, nn::ParamStore& s) {
    nn::Var chm = FuseChem(tape, s, tape.Constant(c1), tape.Constant(c2), 6);
    return nn::Sum(nn::Mul(nn::Tanh(chm), tape.Constant(probe_f)));
  };
  r = nn::GradCheck(fuse, store_, 1e-5, 1e-3, {"head.Wc", "head.bc"});
  EXPECT_EQ(r.n_checked, 52u);
  EXPECT_LT(r.max_rel_error, 1e-6) << r.worst_param;
}

TEST_F(HeadTest, ClassifyTextIsStochasticAndUniformAtZero) {
  ModelConfig text_cfg = TinyModelConfig(20, Mode::kTextOnly);
  nn::ParamStore s;
  InitModelParams(s, text_cfg);
  nn::Tape tape(false);
  nn::Var feats = tape.Constant(RandomTensor({1, 24}, rng_, 3.0));
  nn::Var p = ClassifyText(tape, s, feats);
  ASSERT_EQ(p.cols(), 5u);
  EXPECT_NEAR(RowSum(p), 1.0, 1e-12);
  s.Value("head.W3").Fill(0.0);
  nn::Var u = ClassifyText(tape, s, feats);
  for (double v : u.value().data()) EXPECT_DOUBLE_EQ(v, 0.2);
}

TEST_F(HeadTest, FuseChemExamples) {
  nn::Tape tape(false);
  nn::Var c1 = tape.Constant(RandomTensor({1, 6}, rng_));
  nn::Var c2 = tape.Constant(RandomTensor({1, 6}, rng_));
  nn::Var ab = FuseChem(tape, store_, c1, c2, 6);
  nn::Var ba = FuseChem(tape, store_, c2, c1, 6);
  EXPECT_EQ(ab.cols(), 4u);
  EXPECT_NE(ab.value().storage(), ba.value().storage());
  nn::Var short_vec = tape.Constant(nn::Tensor({1, 5}));
  EXPECT_THROW(FuseChem(tape, store_, c1, short_vec, 6), ShapeError);
  store_.Value("head.Wc").Fill(0.0);
  nn::Var z = FuseChem(tape, store_, c1, c2, 6);
  for (double v : z.value().data()) EXPECT_EQ(v, 0.0);
}

TEST_F(HeadTest, ClassifyFusedZeroBlockMatchesText) {
  nn::Tape tape(false);
  nn::Var feats = tape.Constant(RandomTensor({1, 24}, rng_, 2.0));
  nn::Var chm = tape.Constant(RandomTensor({1, 4}, rng_));
  nn::Var fused = ClassifyFused(tape, store_, feats, chm);
  EXPECT_NEAR(RowSum(fused), 1.0, 1e-12);

  nn::Tensor& w3f = store_.Value("head.W3f");
  for (std::size_t r = 0; r < 5; ++r) {
    for (std::size_t c = 24; c < 28; ++c) w3f.at(r, c) = 0.0;
  }
  nn::ParamStore text;
  nn::Tensor w3({5, 24});
  for (std::size_t r = 0; r < 5; ++r) {
    for (std::size_t c = 0; c < 24; ++c) w3.at(r, c) = w3f.at(r, c);
  }
  text.Add("head.W3", w3);
  text.Add("head.b3", store_.Value("head.b3f"));
  nn::Var a = ClassifyFused(tape, store_, feats, chm);
  nn::Var b = ClassifyText(tape, text, feats);
  EXPECT_EQ(a.value().storage(), b.value().storage());
}

TEST(HeadShapes, FullAndDeskSizes) {
  ModelConfig full = TinyModelConfig(10, Mode::kTextOnly);
  full.encoder.d_model = 768;
  full.encoder.n_heads = 12;
  full.encoder.max_seq_len = 8;
  nn::ParamStore s;
  InitModelParams(s, full);
  EXPECT_EQ(s.Value("head.W3").shape(), (nn::Shape{5, 2304}));
  EXPECT_EQ(s.Value("head.Wshared").shape(), (nn::Shape{768, 768}));

  ModelConfig desk = TinyModelConfig(10, Mode::kFused);
  desk.encoder.d_model = 128;
  desk.encoder.n_heads = 4;
  desk.fusion_dim = 128;
  desk.chem_dim = 292;
  nn::ParamStore f;
  InitModelParams(f, desk);
  EXPECT_EQ(f.Value("head.W3f").shape(), (nn::Shape{5, 512}));
  EXPECT_EQ(f.Value("head.Wc").shape(), (nn::Shape{128, 584}));
  EXPECT_FALSE(f.Contains("head.W3"));
}

TEST(InitModel, FusedTextBlockEqualsTextOnlyW3) {
  nn::ParamStore t, f;
  InitModelParams(t, TinyModelConfig(20, Mode::kTextOnly));
  InitModelParams(f, TinyModelConfig(20, Mode::kFused));
  const nn::Tensor& w3 = t.Value("head.W3");
  const nn::Tensor& w3f = f.Value("head.W3f");
  for (std::size_t r = 0; r < 5; ++r) {
    for (std::size_t c = 0; c < 24; ++c) EXPECT_EQ(w3f.at(r, c), w3.at(r, c));
  }
  for (const auto& [name, p] : t) {
    if (name.starts_with("enc.") || name == "head.W0" || name == "head.Wshared") {
      EXPECT_EQ(p.value.storage(), f.Value(name).storage()) << name;
    }
  }
}

TEST(ModelConfigTest, KeyValuesAndModes) {
  ModelConfig c = TinyModelConfig(42, Mode::kFused);
  ModelConfig back = ModelConfig::FromKeyValues(c.ToKeyValues());
  EXPECT_EQ(back.ToKeyValues(), c.ToKeyValues());
  EXPECT_EQ(ModeFromName("text_only"), Mode::kTextOnly);
  EXPECT_EQ(ModeFromName("fused"), Mode::kFused);
  EXPECT_THROW(ModeFromName("chem"), ConfigError);
  c.encoder.n_heads = 3;
  EXPECT_THROW(c.Validate(), ConfigError);
}

// -------------------------------------------------------------- full model

std::vector<corpus::PairInstance> RandomInstances(std::size_t n, std::uint64_t seed) {
  const std::vector<std::string> words = {"aspirin", "increases", "the", "effect", "of",
                                          "warfarin", "and", "is", "a", "inhibitor"};
  const std::vector<std::string> drugs = {"aspirin", "warfarin", "theophylline", "glepafloxacin"};
  nn::Rng rng(seed);
  std::vector<corpus::PairInstance> out;
  for (std::size_t i = 0; i < n; ++i) {
    std::string d1 = drugs[rng.Below(drugs.size())];
    std::string d2 = drugs[rng.Below(drugs.size())];
    std::string text = d1;
    std::size_t gap = 1 + rng.Below(6);
    for (std::size_t k = 0; k < gap; ++k) text += " " + words[rng.Below(words.size())];
    std::size_t e2_start = text.size() + 1;
    text += " " + d2;
    for (std::size_t k = rng.Below(4); k > 0; --k) text += " " + words[rng.Below(words.size())];
    corpus::PairInstance p = MakePair(text, d1, d2, corpus::kAllLabels[rng.Below(5)]);
    p.e2.char_start = e2_start;
    p.e2.char_end = e2_start + d2.size();
    p.sentence_id = "r" + std::to_string(i);
    p.e2.drug_id = (d2 == "aspirin") ? "DB1" : "";
    out.push_back(std::move(p));
  }
  return out;
}

chemvae::ChemLookup TinyLookup(nn::Rng& rng) {
  std::vector<double> v(6);
  for (double& x : v) x = rng.Normal();
  return chemvae::ChemLookup(6, {{"DB1", v, chemvae::EmbeddingSource::kVae}});
}

TEST(ForwardTest, ZeroChemMatchesTextOnlyBitExactly) {
  Tokenizer tok = WordTokenizer();
  nn::Rng rng(77);
  chemvae::ChemLookup chem = TinyLookup(rng);
  ModelConfig tcfg = TinyModelConfig(tok.size(), Mode::kTextOnly);
  ModelConfig fcfg = TinyModelConfig(tok.size(), Mode::kFused);
  nn::ParamStore ts, fs;
  InitModelParams(ts, tcfg);
  InitModelParams(fs, fcfg, /*zero_chem=*/true);
  auto instances = RandomInstances(100, 5);
  chem.AddParams(fs, instances, fcfg.seed);
  for (const auto& inst : instances) {
    Prediction a = Predict(ts, tcfg, tok, inst, nullptr);
    Prediction b = Predict(fs, fcfg, tok, inst, &chem);
    ASSERT_EQ(a.probs, b.probs) << inst.sentence_text;
    EXPECT_EQ(a.label, b.label);
  }
}

TEST(ForwardTest, GlepafloxacinSentenceEndToEnd) {
  const std::string sentence =
      "Glepafloxacin is a competitive inhibitor of the metabolism of theophylline.";
  std::vector<std::string> texts = {sentence};
  Tokenizer tok = Tokenizer::Train(texts);
  auto inst = MakePair(sentence, "Glepafloxacin", "theophylline", RelationLabel::kMechanism);
  nn::Rng rng(3);
  chemvae::ChemLookup chem = TinyLookup(rng);
  ModelConfig cfg = TinyModelConfig(tok.size(), Mode::kFused);
  cfg.encoder.max_seq_len = 128;
  nn::ParamStore store;
  InitModelParams(store, cfg);
  std::size_t before = store.size();
  Prediction p = Predict(store, cfg, tok, inst, &chem);
  EXPECT_EQ(store.size(), before);
  ASSERT_EQ(p.probs.size(), 5u);
  EXPECT_NEAR(std::accumulate(p.probs.begin(), p.probs.end(), 0.0), 1.0, 1e-12);
  for (double v : p.probs) EXPECT_GT(v, 0.0);
  EXPECT_EQ(p.label, PredictLabel(p.probs));
}

TEST(ForwardTest, FusedNeedsChem) {
  Tokenizer tok = WordTokenizer();
  ModelConfig cfg = TinyModelConfig(tok.size(), Mode::kFused);
  nn::ParamStore store;
  InitModelParams(store, cfg);
  auto inst = MakePair("aspirin and warfarin", "aspirin", "warfarin");
  EXPECT_THROW(Predict(store, cfg, tok, inst, nullptr), ConfigError);
  chemvae::ChemLookup wrong(7, {});
  EXPECT_THROW(Predict(store, cfg, tok, inst, &wrong), ShapeError);
}

TEST(ForwardTest, FullModelGradCheck) {
  Tokenizer tok = WordTokenizer();
  nn::Rng rng(12);
  chemvae::ChemLookup chem = TinyLookup(rng);
  ModelConfig cfg = TinyModelConfig(tok.size(), Mode::kFused);
  nn::ParamStore store;
  InitModelParams(store, cfg);
  auto inst = MakePair("aspirin increases the effect of warfarin.", "aspirin", "warfarin",
                       RelationLabel::kEffect);
  inst.e1.drug_id = "DB1";
  chem.AddParams(store, std::span(&inst, 1), cfg.seed);
  for (auto& [name, p] : store) {
    if (name.find(".g") != std::string::npos) continue;
    for (double& v : p.value.data()) v += 0.2 * rng.Normal();
  }
  TokenizedInstance toks = Tokenize(inst, tok, cfg.encoder.max_seq_len);
  std::size_t target = static_cast<std::size_t>(inst.label);
  auto loss = [&](nn::Tape& tape, nn::ParamStore& s) {
    nn::Var probs = Forward(tape, s, cfg, inst, toks, &chem, nullptr, false);
    return nn::CrossEntropy(probs, std::span(&target, 1));
  };
  nn::GradCheckResult r = nn::GradCheck(loss, store);
  EXPECT_EQ(r.n_checked, store.NumScalars());
  EXPECT_LT(r.max_rel_error, 1e-4) << r.worst_param << "[" << r.worst_index << "] "
                                    << r.worst_analytic << " vs " << r.worst_numeric;
  EXPECT_TRUE(store.Contains(chemvae::ChemLookup::FallbackName(inst.e2)));
}

TEST(ForwardTest, DropoutOnlyInTraining) {
  Tokenizer tok = WordTokenizer();
  ModelConfig cfg = TinyModelConfig(tok.size(), Mode::kTextOnly);
  cfg.encoder.dropout = 0.5;
  nn::ParamStore store;
  InitModelParams(store, cfg);
  auto inst = MakePair("aspirin increases the effect of warfarin.", "aspirin", "warfarin");
  TokenizedInstance toks = Tokenize(inst, tok, cfg.encoder.max_seq_len);
  nn::Rng r1(1), r2(1);
  nn::Tape a, b, c(false);
  nn::Var pa = Forward(a, store, cfg, inst, toks, nullptr, &r1, true);
  nn::Var pb = Forward(b, store, cfg, inst, toks, nullptr, &r2, true);
  nn::Var pc = Forward(c, store, cfg, inst, toks, nullptr, nullptr, false);
  EXPECT_EQ(pa.value().storage(), pb.value().storage());
  EXPECT_NE(pa.value().storage(), pc.value().storage());
}

TEST(PredictLabelTest, ArgmaxTiesToLowestIndex) {
  std::vector<double> tie = {0.1, 0.3, 0.3, 0.2, 0.1};
  EXPECT_EQ(PredictLabel(tie), RelationLabel::kEffect);
  std::vector<double> uniform(5, 0.2);
  EXPECT_EQ(PredictLabel(uniform), RelationLabel::kMechanism);
  std::vector<double> neg = {0.1, 0.1, 0.1, 0.1, 0.6};
  EXPECT_EQ(PredictLabel(neg), RelationLabel::kNegative);
  std::vector<double> four(4, 0.25);
  EXPECT_THROW(PredictLabel(four), ShapeError);
}

}  // namespace
}  // namespace bcddi::ddi
