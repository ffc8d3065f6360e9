// SPDX-License-Identifier: Apache-2.0

#include "bcddi/corpus.h"

#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <unordered_map>

#include "json.hpp"

#include "bcddi/errors.h"
#include "bcddi/text.h"

namespace bcddi::corpus {

using nlohmann::json;

std::string_view LabelName(RelationLabel label) {
  switch (label) {
    case RelationLabel::kMechanism:
      return "Mechanism";
    case RelationLabel::kEffect:
      return "Effect";
    case RelationLabel::kAdvice:
      return "Advice";
    case RelationLabel::kInt:
      return "Int";
    case RelationLabel::kNegative:
      return "Negative";
  }
  return "Negative";
}

RelationLabel LabelFromName(std::string_view name) {
  for (RelationLabel l : kAllLabels) {
    if (LabelName(l) == name) return l;
  }
  throw LabelError("unknown relation label '" + std::string(name) + "'");
}

RelationLabel LabelFromCorpusType(std::string_view type) {
  std::string t = text::CaseFold(text::CollapseWhitespace(type));
  if (t == "mechanism") return RelationLabel::kMechanism;
  if (t == "effect") return RelationLabel::kEffect;
  if (t == "advise" || t == "advice") return RelationLabel::kAdvice;
  if (t == "int") return RelationLabel::kInt;
  throw LabelError("unknown interaction type '" + std::string(type) + "'");
}

std::vector<PairInstance> MakeInstances(const Document& doc, std::size_t* rejected) {
  std::vector<PairInstance> out;
  for (const Sentence& s : doc.sentences) {
    std::unordered_map<std::string, const EntityMention*> by_id;
    for (const EntityMention& m : s.entities) by_id.emplace(m.id, &m);
    for (const PairAnnotation& p : s.pairs) {
      auto a = by_id.find(p.e1);
      auto b = by_id.find(p.e2);
      if (a == by_id.end() || b == by_id.end()) {
        throw ReferenceError("pair " + p.id + " references missing entity " +
                             (a == by_id.end() ? p.e1 : p.e2));
      }
      const EntityMention* e1 = a->second;
      const EntityMention* e2 = b->second;
      if (e1->char_start == e2->char_start) {
        if (rejected != nullptr) ++*rejected;
        continue;
      }
      if (e2->char_start < e1->char_start) std::swap(e1, e2);
      out.push_back(PairInstance{s.id, p.id, s.text, *e1, *e2, p.label});
    }
  }
  return out;
}

std::vector<PairInstance> MakeInstances(std::span<const Document> docs, std::size_t* rejected) {
  std::vector<PairInstance> out;
  for (const Document& d : docs) {
    auto part = MakeInstances(d, rejected);
    out.insert(out.end(), std::make_move_iterator(part.begin()),
               std::make_move_iterator(part.end()));
  }
  return out;
}

CorpusStats ComputeStats(std::span<const PairInstance> instances,
                         std::span<const Document> documents) {
  CorpusStats stats;
  stats.n_documents = documents.size();
  std::set<std::string> drugs;
  for (const Document& d : documents) {
    stats.n_sentences += d.sentences.size();
    for (const Sentence& s : d.sentences) {
      for (const EntityMention& m : s.entities) {
        drugs.insert(text::CaseFold(text::CollapseWhitespace(m.text)));
      }
    }
  }
  stats.n_unique_drugs = drugs.size();
  stats.n_pairs = instances.size();
  for (const PairInstance& inst : instances) ++stats.label_histogram[LabelIndex(inst.label)];
  return stats;
}

std::string StatsToJson(const CorpusStats& stats) {
  json hist = json::object();
  for (RelationLabel l : kAllLabels) {
    hist[std::string(LabelName(l))] = stats.label_histogram[LabelIndex(l)];
  }
  json j = {{"n_documents", stats.n_documents},
            {"n_sentences", stats.n_sentences},
            {"n_pairs", stats.n_pairs},
            {"n_unique_drugs", stats.n_unique_drugs},
            {"label_histogram", hist}};
  return j.dump(2) + "\n";
}

namespace {

json MentionToJson(const EntityMention& m) {
  json j = {{"id", m.id},
            {"text", m.text},
            {"start", m.char_start},
            {"end", m.char_end},
            {"type", m.entity_type}};
  j["drug_id"] = m.drug_id.empty() ? json(nullptr) : json(m.drug_id);
  if (m.offsets.find(';') != std::string::npos) j["offsets"] = m.offsets;
  return j;
}

EntityMention MentionFromJson(const json& j) {
  EntityMention m;
  m.id = j.at("id").get<std::string>();
  m.text = j.at("text").get<std::string>();
  m.char_start = j.at("start").get<std::size_t>();
  m.char_end = j.at("end").get<std::size_t>();
  m.entity_type = j.value("type", "");
  if (j.contains("drug_id") && !j["drug_id"].is_null()) m.drug_id = j["drug_id"].get<std::string>();
  if (j.contains("offsets")) {
    m.offsets = j["offsets"].get<std::string>();
  } else {
    m.offsets = std::to_string(m.char_start) + "-" + std::to_string(m.char_end - 1);
  }
  if (m.char_end <= m.char_start) throw FormatError("mention " + m.id + " has an empty span");
  return m;
}

}  // namespace

void WriteInstances(std::ostream& out, std::span<const PairInstance> instances) {
  for (const PairInstance& inst : instances) {
    json j = {{"sentence_id", inst.sentence_id},
              {"pair_id", inst.pair_id},
              {"text", inst.sentence_text},
              {"e1", MentionToJson(inst.e1)},
              {"e2", MentionToJson(inst.e2)},
              {"label", std::string(LabelName(inst.label))}};
    out << j.dump() << '\n';
  }
}

std::vector<PairInstance> ReadInstances(std::istream& in) {
  std::vector<PairInstance> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::CollapseWhitespace(line).empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw FormatError("instance line " + std::to_string(line_no) + ": " + e.what());
    }
    PairInstance inst;
    try {
      inst.sentence_id = j.at("sentence_id").get<std::string>();
      inst.pair_id = j.value("pair_id", "");
      inst.sentence_text = j.at("text").get<std::string>();
      inst.e1 = MentionFromJson(j.at("e1"));
      inst.e2 = MentionFromJson(j.at("e2"));
      inst.label = LabelFromName(j.at("label").get<std::string>());
    } catch (const json::exception& e) {
      throw FormatError("instance line " + std::to_string(line_no) + ": " + e.what());
    }
    std::size_t len = text::DecodeUtf8(inst.sentence_text).size();
    if (inst.e1.char_end > len || inst.e2.char_end > len) {
      throw OffsetError("instance line " + std::to_string(line_no) +
                        ": mention offset outside sentence");
    }
    if (inst.e1.char_start >= inst.e2.char_start) {
      throw FormatError("instance line " + std::to_string(line_no) +
                        ": e1 must start before e2");
    }
    out.push_back(std::move(inst));
  }
  return out;
}

std::vector<PairInstance> ReadInstancesFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open instance file '" + path + "'");
  return ReadInstances(in);
}

void WriteInstancesFile(const std::string& path, std::span<const PairInstance> instances) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  WriteInstances(out, instances);
  if (!out) throw IoError("failed writing '" + path + "'");
}

}  // namespace bcddi::corpus
