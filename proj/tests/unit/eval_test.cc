// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <string>
#include <vector>

#include "gtest/gtest.h"

#include "bcddi/errors.h"
#include "bcddi/eval.h"
#include "bcddi/nn/rng.h"

namespace bcddi::eval {
namespace {

using corpus::RelationLabel;
using L = RelationLabel;

// Scores recomputed from the label sequences by definition, without a
// confusion matrix.
struct Oracle {
  double p[5], r[5], f[5];
  double macro, micro;
};

Oracle BruteForce(const std::vector<L>& gold, const std::vector<L>& pred) {
  Oracle o{};
  double tp_all = 0, fp_all = 0, fn_all = 0;
  for (int c = 0; c < 5; ++c) {
    double tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < gold.size(); ++i) {
      bool g = static_cast<int>(gold[i]) == c, p = static_cast<int>(pred[i]) == c;
      if (g && p) tp += 1;
      if (!g && p) fp += 1;
      if (g && !p) fn += 1;
    }
    o.p[c] = tp + fp > 0 ? tp / (tp + fp) : 0.0;
    o.r[c] = tp + fn > 0 ? tp / (tp + fn) : 0.0;
    o.f[c] = o.p[c] + o.r[c] > 0 ? 2 * o.p[c] * o.r[c] / (o.p[c] + o.r[c]) : 0.0;
    if (c < 4) {
      tp_all += tp;
      fp_all += fp;
      fn_all += fn;
    }
  }
  o.macro = (o.f[0] + o.f[1] + o.f[2] + o.f[3]) / 4.0;
  double mp = tp_all + fp_all > 0 ? tp_all / (tp_all + fp_all) : 0.0;
  double mr = tp_all + fn_all > 0 ? tp_all / (tp_all + fn_all) : 0.0;
  o.micro = mp + mr > 0 ? 2 * mp * mr / (mp + mr) : 0.0;
  return o;
}

std::vector<L> RandomLabels(nn::Rng& rng, std::size_t n) {
  std::vector<L> out(n);
  for (L& l : out) l = corpus::kAllLabels[rng.Below(5)];
  return out;
}

TEST(EvaluateTest, PerfectPredictions) {
  std::vector<L> gold = {L::kMechanism, L::kEffect, L::kAdvice, L::kInt, L::kNegative};
  EvalReport r = Evaluate(gold, gold);
  for (const ClassScores& s : r.per_class) EXPECT_EQ(s.f1, 1.0);
  EXPECT_EQ(r.macro_f1_positive, 1.0);
  EXPECT_EQ(r.micro_f1_positive, 1.0);
  EXPECT_EQ(r.n_instances, 5u);
}

TEST(EvaluateTest, HandComputedEffect) {
  std::vector<L> gold = {L::kEffect, L::kEffect, L::kNegative};
  std::vector<L> pred = {L::kEffect, L::kNegative, L::kEffect};
  EvalReport r = Evaluate(gold, pred);
  const ClassScores& e = r.at(L::kEffect);
  EXPECT_EQ(e.tp, 1u);
  EXPECT_EQ(e.fp, 1u);
  EXPECT_EQ(e.fn, 1u);
  EXPECT_EQ(e.precision, 0.5);
  EXPECT_EQ(e.recall, 0.5);
  EXPECT_EQ(e.f1, 0.5);
  EXPECT_EQ(r.micro_f1_positive, 0.5);
  EXPECT_EQ(r.macro_f1_positive, 0.125);
}

TEST(EvaluateTest, AllNegativePredictions) {
  std::vector<L> gold = {L::kEffect, L::kAdvice, L::kNegative};
  std::vector<L> pred(3, L::kNegative);
  EvalReport r = Evaluate(gold, pred);
  EXPECT_EQ(r.macro_f1_positive, 0.0);
  EXPECT_EQ(r.micro_f1_positive, 0.0);
}

TEST(EvaluateTest, InputErrors) {
  std::vector<L> a = {L::kEffect}, b;
  EXPECT_THROW(Evaluate(a, b), InputError);
  EXPECT_THROW(Evaluate(b, b), InputError);
}

TEST(EvaluateTest, MatchesBruteForceOracle) {
  nn::Rng rng(2024);
  for (int trial = 0; trial < 1000; ++trial) {
    std::size_t n = 1 + rng.Below(60);
    std::vector<L> gold = RandomLabels(rng, n), pred = RandomLabels(rng, n);
    EvalReport r = Evaluate(gold, pred);
    Oracle o = BruteForce(gold, pred);
    for (int c = 0; c < 5; ++c) {
      ASSERT_EQ(r.per_class[c].precision, o.p[c]);
      ASSERT_EQ(r.per_class[c].recall, o.r[c]);
      ASSERT_EQ(r.per_class[c].f1, o.f[c]);
    }
    ASSERT_EQ(r.macro_f1_positive, o.macro);
    ASSERT_EQ(r.micro_f1_positive, o.micro);
    // Confusion rows sum to gold counts.
    for (int g = 0; g < 5; ++g) {
      std::size_t row = 0;
      for (std::size_t v : r.confusion[g]) row += v;
      ASSERT_EQ(row, static_cast<std::size_t>(std::count(gold.begin(), gold.end(),
                                                          corpus::kAllLabels[g])));
    }
  }
}

TEST(EvaluateTest, MicroInvariantUnderPermutation) {
  nn::Rng rng(9);
  std::vector<L> gold = RandomLabels(rng, 50), pred = RandomLabels(rng, 50);
  double base = Evaluate(gold, pred).micro_f1_positive;
  std::vector<std::size_t> idx(50);
  for (std::size_t i = 0; i < 50; ++i) idx[i] = i;
  rng.Shuffle(idx.begin(), idx.end());
  std::vector<L> g2, p2;
  for (std::size_t i : idx) {
    g2.push_back(gold[i]);
    p2.push_back(pred[i]);
  }
  EXPECT_EQ(Evaluate(g2, p2).micro_f1_positive, base);
}

TEST(EvaluateTest, CorrectPositiveNeverLowersMicro) {
  nn::Rng rng(10);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<L> gold = RandomLabels(rng, 20), pred = RandomLabels(rng, 20);
    double before = Evaluate(gold, pred).micro_f1_positive;
    L extra = corpus::kAllLabels[rng.Below(4)];
    gold.push_back(extra);
    pred.push_back(extra);
    EXPECT_GE(Evaluate(gold, pred).micro_f1_positive, before);
  }
}

TEST(ReportJson, RoundTripThroughConfusion) {
  nn::Rng rng(3);
  std::vector<L> gold = RandomLabels(rng, 40), pred = RandomLabels(rng, 40);
  EvalReport r = Evaluate(gold, pred);
  std::string json = ReportToJson(r);
  EvalReport back = ReportFromJson(json);
  EXPECT_EQ(ReportToJson(back), json);
  EXPECT_NE(json.find("\"macro_f1_positive\""), std::string::npos);
  EXPECT_THROW(ReportFromJson("{}"), FormatError);
  EXPECT_THROW(ReportFromJson("not json"), FormatError);
}

TEST(RenderReportTest, PerTypeAndSummary) {
  std::vector<L> gold = {L::kMechanism, L::kEffect, L::kAdvice, L::kInt, L::kNegative};
  std::vector<ReportRow> rows = {{"text", "none", Evaluate(gold, gold)}};
  std::string t2 = RenderReport(rows, ReportStyle::kPerType);
  EXPECT_EQ(t2,
            "Model    Adv    Eff    Mch    Int    Tot  Micro\n"
            "text   1.000  1.000  1.000  1.000  1.000  1.000\n");
  EXPECT_EQ(RenderReport(rows, ReportStyle::kPerType), t2);
  std::string t3 = RenderReport(rows, ReportStyle::kSummary);
  EXPECT_EQ(t3,
            "Model  Embedding  Macro-F1\n"
            "text   none          1.000\n");
  EXPECT_EQ(StyleFromName("summary"), ReportStyle::kSummary);
  EXPECT_THROW(StyleFromName("wide"), ConfigError);
}

TEST(CompareRunsTest, IdenticalAndHandArithmetic) {
  std::vector<L> gold = {L::kEffect, L::kEffect, L::kNegative, L::kMechanism};
  std::vector<L> a_pred = {L::kEffect, L::kNegative, L::kEffect, L::kNegative};
  std::vector<L> b_pred = {L::kEffect, L::kEffect, L::kNegative, L::kMechanism};
  EvalReport a = Evaluate(gold, a_pred), b = Evaluate(gold, b_pred);
  RunDelta same = CompareRuns(a, a);
  for (double d : same.f1) EXPECT_EQ(d, 0.0);
  EXPECT_EQ(same.macro_f1_positive, 0.0);
  // a: Effect F1 0.5, Mechanism 0 -> macro 0.125. b: Effect 1, Mechanism 1 -> macro 0.5.
  RunDelta d = CompareRuns(a, b);
  EXPECT_EQ(d.f1[static_cast<std::size_t>(L::kEffect)], 0.5);
  EXPECT_EQ(d.f1[static_cast<std::size_t>(L::kMechanism)], 1.0);
  EXPECT_EQ(d.macro_f1_positive, 0.375);
  std::string text = RenderDelta(d);
  EXPECT_NE(text.find("macro_f1      +0.375"), std::string::npos) << text;
  EXPECT_NE(text.find("Advice_f1     +0.000"), std::string::npos) << text;

  std::vector<L> shorter = {L::kEffect};
  EXPECT_THROW(CompareRuns(a, Evaluate(shorter, shorter)), InputError);
}

}  // namespace
}  // namespace bcddi::eval
