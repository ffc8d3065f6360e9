// SPDX-License-Identifier: Apache-2.0
//
// DDIExtraction-2013 corpus reader and the pair instances derived from it.
//
// Offsets are counted in Unicode code points. The XML stores inclusive
// "start-end" spans; mentions hold half-open [char_start, char_end).

#ifndef BCDDI_CORPUS_H_
#define BCDDI_CORPUS_H_

#include <array>
#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace bcddi::corpus {

enum class RelationLabel { kMechanism = 0, kEffect, kAdvice, kInt, kNegative };

inline constexpr std::size_t kNumLabels = 5;
inline constexpr std::array<RelationLabel, kNumLabels> kAllLabels = {
    RelationLabel::kMechanism, RelationLabel::kEffect, RelationLabel::kAdvice,
    RelationLabel::kInt, RelationLabel::kNegative};

// "Mechanism", "Effect", "Advice", "Int", "Negative".
std::string_view LabelName(RelationLabel label);
// Inverse of LabelName; throws LabelError.
RelationLabel LabelFromName(std::string_view name);
// Corpus type attribute: mechanism / effect / advise (or advice) / int,
// case-insensitive. Throws LabelError.
RelationLabel LabelFromCorpusType(std::string_view type);
inline std::size_t LabelIndex(RelationLabel l) { return static_cast<std::size_t>(l); }

struct EntityMention {
  std::string id;
  std::string text;
  std::size_t char_start = 0;  // inclusive
  std::size_t char_end = 0;    // exclusive
  std::string entity_type;
  // Original charOffset attribute; differs from [start, end) only for
  // discontinuous mentions, where the first span is kept.
  std::string offsets;
  // Filled in by lexicon normalization, empty when not normalized.
  std::string drug_id;

  bool operator==(const EntityMention&) const = default;
};

struct PairAnnotation {
  std::string id;
  std::string e1;
  std::string e2;
  RelationLabel label = RelationLabel::kNegative;

  bool operator==(const PairAnnotation&) const = default;
};

struct Sentence {
  std::string id;
  std::string text;
  std::vector<EntityMention> entities;
  std::vector<PairAnnotation> pairs;

  bool operator==(const Sentence&) const = default;
};

struct Document {
  std::string id;
  std::string source;
  std::vector<Sentence> sentences;

  bool operator==(const Document&) const = default;
};

struct PairInstance {
  std::string sentence_id;
  std::string pair_id;
  std::string sentence_text;
  EntityMention e1;
  EntityMention e2;
  RelationLabel label = RelationLabel::kNegative;

  bool operator==(const PairInstance&) const = default;
};

struct CorpusStats {
  std::size_t n_documents = 0;
  std::size_t n_sentences = 0;
  std::size_t n_pairs = 0;
  std::size_t n_unique_drugs = 0;
  std::array<std::size_t, kNumLabels> label_histogram{};
};

// Parses one XML file's bytes. `source` names the input in error messages.
// Throws ParseError (with byte position), OffsetError or LabelError.
std::vector<Document> ParseCorpusXml(std::string_view xml, const std::string& source);
std::vector<Document> ParseCorpusFile(const std::string& path);

struct CorpusParseResult {
  std::vector<Document> documents;
  // path -> error message, for files that failed to parse.
  std::map<std::string, std::string> failures;
};

// Every *.xml under `dir`, recursively, in sorted path order.
CorpusParseResult ParseCorpusDirectory(const std::string& dir);

// One instance per annotated pair, in document order. e1/e2 are ordered by
// start offset. Pairs whose mentions start at the same offset are skipped
// and counted in `rejected`. Throws ReferenceError for unknown entity ids.
std::vector<PairInstance> MakeInstances(const Document& doc,
                                        std::size_t* rejected = nullptr);
std::vector<PairInstance> MakeInstances(std::span<const Document> docs,
                                        std::size_t* rejected = nullptr);

// Unique drugs are case-folded entity surface forms over all documents.
CorpusStats ComputeStats(std::span<const PairInstance> instances,
                         std::span<const Document> documents);
std::string StatsToJson(const CorpusStats& stats);

// Newline-delimited JSON, one object per instance:
//   {"sentence_id","pair_id","text",
//    "e1":{"id","text","start","end","type","drug_id"},"e2":{...},"label"}
// start/end are half-open code point offsets; drug_id is null when absent.
void WriteInstances(std::ostream& out, std::span<const PairInstance> instances);
std::vector<PairInstance> ReadInstances(std::istream& in);
std::vector<PairInstance> ReadInstancesFile(const std::string& path);
void WriteInstancesFile(const std::string& path, std::span<const PairInstance> instances);

}  // namespace bcddi::corpus

#endif  // BCDDI_CORPUS_H_
