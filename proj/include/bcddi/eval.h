// SPDX-License-Identifier: Apache-2.0
//
// Relation classification scoring. The four interaction types are the
// positive classes; Negative counts as "no relation" in the aggregates.

#ifndef BCDDI_EVAL_H_
#define BCDDI_EVAL_H_

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "bcddi/corpus.h"

namespace bcddi::eval {

inline constexpr std::size_t kNumPositive = 4;

struct ClassScores {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t support = 0;  // gold count
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// confusion[gold][predicted], indexed by label order.
using Confusion = std::array<std::array<std::size_t, corpus::kNumLabels>, corpus::kNumLabels>;

struct EvalReport {
  std::array<ClassScores, corpus::kNumLabels> per_class;
  double macro_f1_positive = 0.0;
  double micro_precision_positive = 0.0;
  double micro_recall_positive = 0.0;
  double micro_f1_positive = 0.0;
  Confusion confusion{};
  std::size_t n_instances = 0;

  const ClassScores& at(corpus::RelationLabel l) const {
    return per_class[static_cast<std::size_t>(l)];
  }
};

// P = TP/(TP+FP), R = TP/(TP+FN), F1 = 2PR/(P+R); each is 0 when its
// denominator is 0. Throws InputError for unequal lengths or no instances.
EvalReport Evaluate(std::span<const corpus::RelationLabel> gold,
                    std::span<const corpus::RelationLabel> predicted);

// All scores are a function of the confusion matrix alone.
EvalReport ReportFromConfusion(const Confusion& confusion);

// {"n_instances", "per_class": {label: {precision, recall, f1, support, tp,
// fp, fn}}, "macro_f1_positive", "micro_f1_positive", ..., "confusion"}.
std::string ReportToJson(const EvalReport& report);
// Rebuilds a report from the "confusion" field. Throws FormatError.
EvalReport ReportFromJson(const std::string& json);

enum class ReportStyle { kPerType, kSummary };
// "per-type" / "summary". Throws ConfigError.
ReportStyle StyleFromName(const std::string& name);

struct ReportRow {
  std::string model;
  std::string embedding;
  EvalReport report;
};

// kPerType: per-type F1 columns Adv Eff Mch Int, Tot (macro) and Micro.
// kSummary: model, embedding, macro F1. Three decimals throughout.
std::string RenderReport(std::span<const ReportRow> rows, ReportStyle style);

struct RunDelta {
  // b - a, per label in label order.
  std::array<double, corpus::kNumLabels> f1{};
  double macro_f1_positive = 0.0;
  double micro_f1_positive = 0.0;
};

// Throws InputError unless both reports cover the same number of
// instances with the same gold distribution.
RunDelta CompareRuns(const EvalReport& a, const EvalReport& b);
// One line per quantity, signed, e.g. "macro_f1  +0.016".
std::string RenderDelta(const RunDelta& delta);

}  // namespace bcddi::eval

#endif  // BCDDI_EVAL_H_
