// SPDX-License-Identifier: Apache-2.0

#include "bcddi/eval.h"

#include <cstdio>
#include <sstream>

#include "bcddi/errors.h"
#include "json.hpp"

namespace bcddi::eval {

namespace {

using corpus::kNumLabels;
using corpus::RelationLabel;

double Ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

double F1(double p, double r) { return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r); }

std::string Fixed3(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

std::string Signed3(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%+.3f", v);
  // "-0.000" reads as a regression; print zero with a plus sign.
  return std::string(buf) == "-0.000" ? "+0.000" : buf;
}

std::string Pad(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

std::string LPad(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : std::string(width - s.size(), ' ') + s;
}

}  // namespace

EvalReport ReportFromConfusion(const Confusion& confusion) {
  EvalReport r;
  r.confusion = confusion;
  for (std::size_t g = 0; g < kNumLabels; ++g) {
    for (std::size_t p = 0; p < kNumLabels; ++p) r.n_instances += confusion[g][p];
  }
  for (std::size_t c = 0; c < kNumLabels; ++c) {
    ClassScores& s = r.per_class[c];
    s.tp = confusion[c][c];
    for (std::size_t o = 0; o < kNumLabels; ++o) {
      s.support += confusion[c][o];
      if (o == c) continue;
      s.fp += confusion[o][c];
      s.fn += confusion[c][o];
    }
    s.precision = Ratio(s.tp, s.tp + s.fp);
    s.recall = Ratio(s.tp, s.tp + s.fn);
    s.f1 = F1(s.precision, s.recall);
  }
  std::size_t tp = 0, fp = 0, fn = 0;
  double f1_sum = 0.0;
  for (std::size_t c = 0; c < kNumPositive; ++c) {
    tp += r.per_class[c].tp;
    fp += r.per_class[c].fp;
    fn += r.per_class[c].fn;
    f1_sum += r.per_class[c].f1;
  }
  r.macro_f1_positive = f1_sum / static_cast<double>(kNumPositive);
  r.micro_precision_positive = Ratio(tp, tp + fp);
  r.micro_recall_positive = Ratio(tp, tp + fn);
  r.micro_f1_positive = F1(r.micro_precision_positive, r.micro_recall_positive);
  return r;
}

EvalReport Evaluate(std::span<const RelationLabel> gold, std::span<const RelationLabel> predicted) {
  if (gold.size() != predicted.size()) {
    throw InputError("gold has " + std::to_string(gold.size()) + " labels but predictions have " +
                     std::to_string(predicted.size()));
  }
  if (gold.empty()) throw InputError("nothing to evaluate: no instances");
  Confusion c{};
  for (std::size_t i = 0; i < gold.size(); ++i) {
    ++c[static_cast<std::size_t>(gold[i])][static_cast<std::size_t>(predicted[i])];
  }
  return ReportFromConfusion(c);
}

std::string ReportToJson(const EvalReport& r) {
  nlohmann::ordered_json j;
  j["n_instances"] = r.n_instances;
  nlohmann::ordered_json per = nlohmann::ordered_json::object();
  for (RelationLabel l : corpus::kAllLabels) {
    const ClassScores& s = r.at(l);
    per[std::string(corpus::LabelName(l))] = {{"precision", s.precision}, {"recall", s.recall},
                                              {"f1", s.f1},         {"support", s.support},
                                              {"tp", s.tp},         {"fp", s.fp},
                                              {"fn", s.fn}};
  }
  j["per_class"] = per;
  j["macro_f1_positive"] = r.macro_f1_positive;
  j["micro_precision_positive"] = r.micro_precision_positive;
  j["micro_recall_positive"] = r.micro_recall_positive;
  j["micro_f1_positive"] = r.micro_f1_positive;
  j["confusion_order"] = nlohmann::ordered_json::array();
  for (RelationLabel l : corpus::kAllLabels) {
    j["confusion_order"].push_back(std::string(corpus::LabelName(l)));
  }
  j["confusion"] = r.confusion;
  return j.dump(2) + "\n";
}

EvalReport ReportFromJson(const std::string& text) {
  Confusion c{};
  try {
    nlohmann::json j = nlohmann::json::parse(text);
    const nlohmann::json& m = j.at("confusion");
    if (!m.is_array() || m.size() != kNumLabels) throw FormatError("confusion must be 5x5");
    for (std::size_t g = 0; g < kNumLabels; ++g) {
      if (!m[g].is_array() || m[g].size() != kNumLabels) {
        throw FormatError("confusion must be 5x5");
      }
      for (std::size_t p = 0; p < kNumLabels; ++p) c[g][p] = m[g][p].get<std::size_t>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("bad report JSON: ") + e.what());
  }
  return ReportFromConfusion(c);
}

ReportStyle StyleFromName(const std::string& name) {
  if (name == "per-type") return ReportStyle::kPerType;
  if (name == "summary") return ReportStyle::kSummary;
  throw ConfigError("unknown report style '" + name + "' (expected per-type or summary)");
}

std::string RenderReport(std::span<const ReportRow> rows, ReportStyle style) {
  std::size_t w_model = 5, w_emb = 9;
  for (const ReportRow& r : rows) {
    w_model = std::max(w_model, r.model.size());
    w_emb = std::max(w_emb, r.embedding.size());
  }
  std::ostringstream out;
  if (style == ReportStyle::kPerType) {
    out << Pad("Model", w_model);
    for (const char* h : {"Adv", "Eff", "Mch", "Int", "Tot", "Micro"}) out << "  " << LPad(h, 5);
    out << '\n';
    for (const ReportRow& r : rows) {
      out << Pad(r.model, w_model);
      for (RelationLabel l : {RelationLabel::kAdvice, RelationLabel::kEffect,
                              RelationLabel::kMechanism, RelationLabel::kInt}) {
        out << "  " << Fixed3(r.report.at(l).f1);
      }
      out << "  " << Fixed3(r.report.macro_f1_positive) << "  "
          << Fixed3(r.report.micro_f1_positive) << '\n';
    }
  } else {
    out << Pad("Model", w_model) << "  " << Pad("Embedding", w_emb) << "  Macro-F1\n";
    for (const ReportRow& r : rows) {
      out << Pad(r.model, w_model) << "  " << Pad(r.embedding, w_emb) << "  "
          << LPad(Fixed3(r.report.macro_f1_positive), 8) << '\n';
    }
  }
  return out.str();
}

RunDelta CompareRuns(const EvalReport& a, const EvalReport& b) {
  if (a.n_instances != b.n_instances) {
    throw InputError("reports cover " + std::to_string(a.n_instances) + " and " +
                     std::to_string(b.n_instances) + " instances");
  }
  for (std::size_t c = 0; c < kNumLabels; ++c) {
    if (a.per_class[c].support != b.per_class[c].support) {
      throw InputError("reports have different gold counts for " +
                       std::string(corpus::LabelName(corpus::kAllLabels[c])));
    }
  }
  RunDelta d;
  for (std::size_t c = 0; c < kNumLabels; ++c) d.f1[c] = b.per_class[c].f1 - a.per_class[c].f1;
  d.macro_f1_positive = b.macro_f1_positive - a.macro_f1_positive;
  d.micro_f1_positive = b.micro_f1_positive - a.micro_f1_positive;
  return d;
}

std::string RenderDelta(const RunDelta& d) {
  std::ostringstream out;
  for (std::size_t c = 0; c < kNumLabels; ++c) {
    out << Pad(std::string(corpus::LabelName(corpus::kAllLabels[c])) + "_f1", 12) << "  "
        << Signed3(d.f1[c]) << '\n';
  }
  out << Pad("macro_f1", 12) << "  " << Signed3(d.macro_f1_positive) << '\n';
  out << Pad("micro_f1", 12) << "  " << Signed3(d.micro_f1_positive) << '\n';
  return out.str();
}

}  // namespace bcddi::eval
