// SPDX-License-Identifier: Apache-2.0

#include "bcddi/lexicon.h"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>

#include "json.hpp"

#include "bcddi/errors.h"
#include "bcddi/smiles.h"
#include "bcddi/text.h"

namespace bcddi::lexicon {

namespace {

std::string NormalName(std::string_view s) {
  return text::CaseFold(text::CollapseWhitespace(s));
}

}  // namespace

std::vector<std::string> OverlapTokens(std::string_view s) {
  std::vector<std::string> out;
  std::u32string cur;
  for (char32_t c : text::DecodeUtf8(text::CaseFold(s))) {
    if (text::IsSpace(c) || c == U'-') {
      if (!cur.empty()) out.push_back(text::EncodeUtf8(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(text::EncodeUtf8(cur));
  return out;
}

std::size_t OverlapScore(std::span<const std::string> a, std::span<const std::string> b) {
  // prev[j]: chars of the common run ending at a[i-1], b[j-1]
  std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  std::size_t best = 0;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + a[i - 1].size() : 0;
      best = std::max(best, cur[j]);
    }
    std::swap(prev, cur);
  }
  return best;
}

bool DrugLexicon::Add(std::string_view name, std::string_view drug_id,
                      std::optional<std::string> smiles) {
  std::string key = NormalName(name);
  if (by_name_.contains(key)) {
    ++duplicates_;
    return false;
  }
  entries_.push_back(DrugEntry{key, std::string(drug_id), std::move(smiles)});
  Reindex();
  return true;
}

void DrugLexicon::Reindex() {
  std::sort(entries_.begin(), entries_.end(), [](const DrugEntry& a, const DrugEntry& b) {
    if (a.name.size() != b.name.size()) return a.name.size() > b.name.size();
    return a.name < b.name;
  });
  by_name_.clear();
  by_token_.clear();
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    by_name_.emplace(entries_[i].name, i);
    std::set<std::string> seen;
    for (std::string& t : OverlapTokens(entries_[i].name)) {
      if (seen.insert(t).second) by_token_[t].push_back(i);
    }
  }
}

DrugLexicon DrugLexicon::Load(std::istream& in) {
  DrugLexicon lex;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> f = text::Split(line, '\t');
    if (f.size() < 2) {
      throw FormatError("lexicon line " + std::to_string(line_no) +
                        ": expected name<TAB>drug_id[<TAB>smiles]");
    }
    std::string key = NormalName(f[0]);
    if (key.empty() || f[1].empty()) {
      throw FormatError("lexicon line " + std::to_string(line_no) + ": empty name or id");
    }
    std::optional<std::string> smi;
    if (f.size() >= 3 && !f[2].empty()) {
      if (!smiles::ValidateChars(f[2])) {
        throw FormatError("lexicon line " + std::to_string(line_no) + ": invalid SMILES '" +
                          f[2] + "'");
      }
      smi = f[2];
    }
    if (lex.by_name_.contains(key)) {
      ++lex.duplicates_;
      continue;
    }
    lex.by_name_.emplace(key, lex.entries_.size());
    lex.entries_.push_back(DrugEntry{key, f[1], std::move(smi)});
  }
  lex.Reindex();
  return lex;
}

DrugLexicon DrugLexicon::LoadFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open lexicon '" + path + "'");
  return Load(in);
}

const DrugEntry* DrugLexicon::Find(std::string_view name) const {
  auto it = by_name_.find(NormalName(name));
  return it == by_name_.end() ? nullptr : &entries_[it->second];
}

NormalizationResult DrugLexicon::Normalize(std::string_view mention) const {
  NormalizationResult r;
  r.mention_text = std::string(mention);
  std::vector<std::string> mt = OverlapTokens(mention);
  std::set<std::size_t> candidates;
  for (const std::string& t : mt) {
    auto it = by_token_.find(t);
    if (it != by_token_.end()) candidates.insert(it->second.begin(), it->second.end());
  }
  const DrugEntry* best = nullptr;
  std::size_t best_score = 0;
  for (std::size_t idx : candidates) {
    const DrugEntry& e = entries_[idx];
    std::size_t s = OverlapScore(mt, OverlapTokens(e.name));
    if (s < kMinOverlapChars) continue;
    if (best == nullptr || s > best_score || (s == best_score && e.name < best->name)) {
      best = &e;
      best_score = s;
    }
  }
  if (best != nullptr) {
    r.matched_name = best->name;
    r.drug_id = best->drug_id;
    r.smiles = best->smiles;
    r.score = best_score;
  }
  return r;
}

CoverageReport ComputeCoverage(std::span<const corpus::PairInstance> instances,
                               const DrugLexicon& lex) {
  std::set<std::string> forms;
  for (const corpus::PairInstance& p : instances) {
    forms.insert(NormalName(p.e1.text));
    forms.insert(NormalName(p.e2.text));
  }
  CoverageReport rep;
  rep.n_unique = forms.size();
  for (const std::string& f : forms) {
    if (lex.Normalize(f).smiles.has_value()) {
      ++rep.n_normalized;
    } else {
      rep.misses.push_back(f);
    }
  }
  return rep;
}

std::string CoverageToJson(const CoverageReport& report) {
  nlohmann::json j = {{"n_unique", report.n_unique},
                      {"n_normalized", report.n_normalized},
                      {"n_missed", report.misses.size()}};
  return j.dump(2) + "\n";
}

void WriteMissList(std::ostream& out, const CoverageReport& report) {
  for (const std::string& m : report.misses) out << m << '\n';
}

void AttachDrugIds(std::span<corpus::PairInstance> instances, const DrugLexicon& lex) {
  for (corpus::PairInstance& p : instances) {
    for (corpus::EntityMention* m : {&p.e1, &p.e2}) {
      m->drug_id = lex.Normalize(m->text).drug_id.value_or("");
    }
  }
}

}  // namespace bcddi::lexicon
