// SPDX-License-Identifier: Apache-2.0

#include <sstream>
#include <string>
#include <vector>

#include "gtest/gtest.h"

#include "bcddi/errors.h"
#include "bcddi/lexicon.h"
#include "bcddi/nn/rng.h"

namespace bcddi::lexicon {
namespace {

DrugLexicon FromText(const std::string& tsv) {
  std::istringstream in(tsv);
  return DrugLexicon::Load(in);
}

corpus::PairInstance Pair(const std::string& a, const std::string& b) {
  corpus::PairInstance p;
  p.sentence_text = a + " and " + b;
  p.e1 = corpus::EntityMention{"e0", a, 0, a.size(), "drug", "", ""};
  p.e2 = corpus::EntityMention{"e1", b, a.size() + 5, p.sentence_text.size(), "drug", "", ""};
  return p;
}

TEST(LoadLexicon, Basics) {
  DrugLexicon lex = FromText("aspirin\tDB00945\t\nwarfarin\tDB00682\tCC\nheparin\tDB01109\tC\n");
  EXPECT_EQ(lex.size(), 3u);
  EXPECT_FALSE(lex.Find("aspirin")->smiles.has_value());
  EXPECT_EQ(lex.Find("WARFARIN")->drug_id, "DB00682");
}

TEST(LoadLexicon, DuplicatesKeepFirst) {
  DrugLexicon lex = FromText("Aspirin\tDB1\tCCO\naspirin\tDB2\tCC\n");
  EXPECT_EQ(lex.size(), 1u);
  EXPECT_EQ(lex.duplicate_warnings(), 1u);
  EXPECT_EQ(lex.Find("aspirin")->drug_id, "DB1");
}

TEST(LoadLexicon, ShortRowNamesLine) {
  try {
    FromText("aspirin\tDB1\nwarfarin\n");
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos) << e.what();
  }
  EXPECT_THROW(FromText("x\tDB1\tC C\n"), FormatError);
}

TEST(LoadLexicon, IndexOrderedByLengthThenName) {
  DrugLexicon lex = FromText("bb\t1\naaa\t2\nab\t3\n");
  ASSERT_EQ(lex.size(), 3u);
  EXPECT_EQ(lex.entries()[0].name, "aaa");
  EXPECT_EQ(lex.entries()[1].name, "ab");
  EXPECT_EQ(lex.entries()[2].name, "bb");
}

TEST(Normalize, LongestOverlapWins) {
  DrugLexicon lex = FromText("warfarin\tDB1\tCC\nwarfarin sodium\tDB2\tCCO\n");
  NormalizationResult r = NormalizeMention("warfarin sodium", lex);
  ASSERT_TRUE(r.matched_name.has_value());
  EXPECT_EQ(*r.matched_name, "warfarin sodium");
  EXPECT_EQ(*r.drug_id, "DB2");
  EXPECT_EQ(*NormalizeMention("warfarin", lex).matched_name, "warfarin");
}

TEST(Normalize, CaseFoldAndThreshold) {
  DrugLexicon lex = FromText("aspirin\tDB1\tCCO\niron\tDB2\t\nzinc oxide\tDB3\t\n");
  EXPECT_EQ(*NormalizeMention("Aspirin", lex).matched_name, "aspirin");
  EXPECT_EQ(*NormalizeMention("ferrous-iron", lex).matched_name, "iron");
  // "zinc" overlaps with exactly 4 characters; "oxi" would not.
  EXPECT_EQ(*NormalizeMention("zinc", lex).matched_name, "zinc oxide");
  NormalizationResult none = NormalizeMention("insulin", lex);
  EXPECT_FALSE(none.matched_name || none.drug_id || none.smiles);
  DrugLexicon small = FromText("abc\tX\tC\n");
  EXPECT_FALSE(NormalizeMention("abc", small).matched_name.has_value());
}

TEST(Normalize, TiesBreakLexicographically) {
  DrugLexicon lex = FromText("calcium citrate\tB\tC\ncalcium acetate\tA\tC\n");
  EXPECT_EQ(*NormalizeMention("calcium", lex).matched_name, "calcium acetate");
  EXPECT_EQ(*NormalizeMention("calcium", lex).matched_name, "calcium acetate");
}

TEST(Coverage, CraftedCorpus) {
  // five drugs, three of them present with SMILES
  DrugLexicon lex = FromText("aspirin\tD1\tCC\nwarfarin\tD2\tCCO\nheparin\tD3\tC\n");
  std::vector<corpus::PairInstance> inst = {Pair("Aspirin", "warfarin"),
                                            Pair("heparin", "Digoxin"),
                                            Pair("warfarin", "Quinidine")};
  CoverageReport rep = ComputeCoverage(inst, lex);
  EXPECT_EQ(rep.n_unique, 5u);
  EXPECT_EQ(rep.n_normalized, 3u);
  EXPECT_EQ(rep.misses, (std::vector<std::string>{"digoxin", "quinidine"}));
  EXPECT_EQ(ComputeCoverage(inst, DrugLexicon()).n_normalized, 0u);
}

TEST(Coverage, AddingEntriesWithSmilesIsMonotone) {
  const std::vector<std::string> names = {"aspirin", "warfarin sodium", "warfarin", "heparin",
                                          "calcium carbonate", "calcium", "digoxin",
                                          "quinidine sulfate", "quinidine", "iron dextran"};
  std::vector<corpus::PairInstance> inst;
  for (std::size_t i = 0; i + 1 < names.size(); i += 2) inst.push_back(Pair(names[i], names[i + 1]));
  inst.push_back(Pair("Iron", "calcium gluconate"));
  nn::Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    DrugLexicon lex;
    std::size_t last = 0;
    std::vector<std::string> order = names;
    rng.Shuffle(order.begin(), order.end());
    for (const std::string& n : order) {
      lex.Add(n, "id-" + n, std::string("CC"));
      std::size_t now = ComputeCoverage(inst, lex).n_normalized;
      EXPECT_GE(now, last);
      last = now;
    }
    EXPECT_EQ(last, 12u);
  }
}

TEST(Fixture, LexiconFile) {
  DrugLexicon lex = DrugLexicon::LoadFile(std::string(BCDDI_FIXTURE_DIR) + "/lexicon.tsv");
  EXPECT_EQ(lex.size(), 6u);
  EXPECT_EQ(lex.duplicate_warnings(), 1u);
  EXPECT_EQ(*NormalizeMention("warfarin sodium", lex).drug_id, "DB00682");
  EXPECT_THROW(DrugLexicon::LoadFile("/nonexistent/lexicon.tsv"), IoError);
}

}  // namespace
}  // namespace bcddi::lexicon
