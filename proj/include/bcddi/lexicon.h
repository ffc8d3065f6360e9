// SPDX-License-Identifier: Apache-2.0
//
// Drug name lexicon and longest-overlap mention normalization.

#ifndef BCDDI_LEXICON_H_
#define BCDDI_LEXICON_H_

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "bcddi/corpus.h"

namespace bcddi::lexicon {

// Matches below this many characters are discarded.
inline constexpr std::size_t kMinOverlapChars = 4;

struct DrugEntry {
  std::string name;      // case-folded, whitespace-collapsed
  std::string drug_id;
  std::optional<std::string> smiles;
};

struct NormalizationResult {
  std::string mention_text;
  std::optional<std::string> matched_name;
  std::optional<std::string> drug_id;
  std::optional<std::string> smiles;
  std::size_t score = 0;
};

class DrugLexicon {
 public:
  DrugLexicon() = default;

  // Rows are "name<TAB>drug_id[<TAB>smiles]". Blank lines and lines starting
  // with '#' are skipped. Duplicate names keep the first row. Throws
  // FormatError (with line number) for short rows or invalid SMILES.
  static DrugLexicon Load(std::istream& in);
  static DrugLexicon LoadFile(const std::string& path);

  // Returns false (and counts a warning) if the name is already present.
  bool Add(std::string_view name, std::string_view drug_id,
           std::optional<std::string> smiles);

  std::size_t size() const { return entries_.size(); }
  std::size_t duplicate_warnings() const { return duplicates_; }
  // Longest name first, then lexicographic.
  const std::vector<DrugEntry>& entries() const { return entries_; }
  const DrugEntry* Find(std::string_view name) const;

  NormalizationResult Normalize(std::string_view mention) const;

 private:
  void Reindex();

  std::vector<DrugEntry> entries_;
  std::unordered_map<std::string, std::size_t> by_name_;
  // token -> entries containing it
  std::unordered_map<std::string, std::vector<std::size_t>> by_token_;
  std::size_t duplicates_ = 0;
};

// Case-folded tokens split on whitespace and hyphens.
std::vector<std::string> OverlapTokens(std::string_view s);

// Characters in the longest common contiguous run of tokens.
std::size_t OverlapScore(std::span<const std::string> a, std::span<const std::string> b);

inline NormalizationResult NormalizeMention(std::string_view mention, const DrugLexicon& lex) {
  return lex.Normalize(mention);
}

struct CoverageReport {
  std::size_t n_unique = 0;
  // Surface forms whose best match carries SMILES.
  std::size_t n_normalized = 0;
  std::vector<std::string> misses;  // sorted
};

// Over case-folded, whitespace-collapsed e1/e2 surface forms.
CoverageReport ComputeCoverage(std::span<const corpus::PairInstance> instances,
                               const DrugLexicon& lex);
std::string CoverageToJson(const CoverageReport& report);
void WriteMissList(std::ostream& out, const CoverageReport& report);

// Sets drug_id on every mention that normalizes to an entry.
void AttachDrugIds(std::span<corpus::PairInstance> instances, const DrugLexicon& lex);

}  // namespace bcddi::lexicon

#endif  // BCDDI_LEXICON_H_
