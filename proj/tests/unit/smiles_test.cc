// SPDX-License-Identifier: Apache-2.0

#include <sstream>
#include <string>
#include <vector>

#include "gtest/gtest.h"

#include "bcddi/errors.h"
#include "bcddi/nn/rng.h"
#include "bcddi/smiles.h"

namespace bcddi::smiles {
namespace {

SmilesVocab VocabOf(std::vector<std::string> s) { return SmilesVocab::Build(s); }

TEST(SmilesVocab, MandatorySetAlwaysPresent) {
  SmilesVocab v = VocabOf({"CCO"});
  for (char c : kMandatoryChars) EXPECT_TRUE(v.Contains(c)) << c;
  EXPECT_EQ(v.size(), kMandatoryChars.size() + 1);
  EXPECT_FALSE(v.Contains('c'));
  EXPECT_TRUE(VocabOf({"c1ccccc1"}).Contains('c'));
}

TEST(SmilesVocab, SortedWithPadFirst) {
  SmilesVocab v = VocabOf({"N#N", "c1ccccc1"});
  const auto& chars = v.chars();
  for (std::size_t i = 1; i < chars.size(); ++i) EXPECT_LT(chars[i - 1], chars[i]);
  EXPECT_EQ(v.CharAt(1), chars.front());
  EXPECT_EQ(*v.IndexOf(chars.front()), 1u);
}

TEST(SmilesVocab, Errors) {
  EXPECT_THROW(VocabOf({}), VocabError);
  EXPECT_THROW(VocabOf({"CC\xc3\xa9"}), VocabError);
  EXPECT_THROW(VocabOf({"C C"}), VocabError);
}

TEST(SmilesVocab, SaveLoadRoundTrip) {
  SmilesVocab v = VocabOf({"C[NH3+]", "c1ccccc1Cl"});
  std::stringstream ss;
  v.Save(ss);
  EXPECT_EQ(ss.str().substr(0, 6), "<pad>\n");
  SmilesVocab back = SmilesVocab::Load(ss);
  EXPECT_EQ(back, v);
  std::istringstream bad("C\nO\n");
  EXPECT_THROW(SmilesVocab::Load(bad), FormatError);
}

TEST(OneHot, EncodesCco) {
  SmilesVocab v = VocabOf({"CCO"});
  SmilesOneHot x = EncodeOneHot("CCO", v);
  ASSERT_EQ(x.matrix.rows(), 120u);
  ASSERT_EQ(x.matrix.cols(), v.size());
  EXPECT_EQ(x.true_len, 3u);
  std::size_t c = *v.IndexOf('C'), o = *v.IndexOf('O');
  EXPECT_EQ(x.matrix.at(0, c), 1.0);
  EXPECT_EQ(x.matrix.at(1, c), 1.0);
  EXPECT_EQ(x.matrix.at(2, o), 1.0);
  for (std::size_t r = 3; r < 120; ++r) EXPECT_EQ(x.matrix.at(r, kPadIndex), 1.0);
  for (std::size_t r = 0; r < 120; ++r) {
    double s = 0;
    for (std::size_t k = 0; k < v.size(); ++k) s += x.matrix.at(r, k);
    EXPECT_EQ(s, 1.0);
  }
}

TEST(OneHot, EmptyAndTruncation) {
  SmilesVocab v = VocabOf({"CCO"});
  SmilesOneHot e = EncodeOneHot("", v);
  EXPECT_EQ(e.true_len, 0u);
  EXPECT_EQ(DecodeGreedy(e.matrix, v), "");
  std::string longer(150, 'C');
  SmilesOneHot t = EncodeOneHot(longer, v);
  EXPECT_EQ(t.true_len, 120u);
  EXPECT_EQ(DecodeGreedy(t.matrix, v), std::string(120, 'C'));
  SmilesOneHot again = EncodeOneHot(longer.substr(0, 120), v);
  EXPECT_EQ(again.matrix.storage(), t.matrix.storage());
}

TEST(OneHot, OutOfVocabNamesPosition) {
  SmilesVocab v = VocabOf({"CCO"});
  try {
    EncodeOneHot("CCN", v);
    FAIL() << "expected EncodeError";
  } catch (const EncodeError& e) {
    EXPECT_NE(std::string(e.what()).find("position 2"), std::string::npos) << e.what();
  }
}

TEST(DecodeGreedy, UniformRowsDecodeEmpty) {
  SmilesVocab v = VocabOf({"CCO"});
  nn::Tensor p(nn::Shape{4, v.size()}, 1.0 / static_cast<double>(v.size()));
  EXPECT_EQ(DecodeGreedy(p, v), "");
}

TEST(DecodeGreedy, PeakedRows) {
  SmilesVocab v = VocabOf({"C=C"});
  nn::Tensor p(nn::Shape{5, v.size()}, 0.0);
  std::string want = "C=C";
  for (std::size_t r = 0; r < 5; ++r) {
    std::size_t hot = r < 3 ? *v.IndexOf(want[r]) : kPadIndex;
    for (std::size_t k = 0; k < v.size(); ++k) p.at(r, k) = k == hot ? 0.6 : 0.4 / (v.size() - 1);
  }
  EXPECT_EQ(DecodeGreedy(p, v), "C=C");
  p.at(0, 0) += 0.01;
  EXPECT_THROW(DecodeGreedy(p, v), DistributionError);
}

TEST(DecodeGreedy, RoundTripRandomStrings) {
  SmilesVocab v = VocabOf({"c1ccccc1N#[NH3+]SBrCl@"});
  nn::Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    std::size_t len = rng.Below(121);
    std::string s;
    for (std::size_t i = 0; i < len; ++i) s += v.CharAt(1 + rng.Below(v.size() - 1));
    EXPECT_EQ(DecodeGreedy(EncodeOneHot(s, v).matrix, v), s);
  }
}

TEST(ValidateSyntax, Examples) {
  EXPECT_TRUE(ValidateSyntax("C(C)O"));
  EXPECT_FALSE(ValidateSyntax("C(C"));
  EXPECT_FALSE(ValidateSyntax("C1CC"));
  EXPECT_FALSE(ValidateSyntax(""));
  EXPECT_FALSE(ValidateSyntax("C)C("));
  EXPECT_TRUE(ValidateSyntax("c1ccccc1"));
  EXPECT_TRUE(ValidateSyntax("C[NH3+]"));
  EXPECT_TRUE(ValidateSyntax("C%12CC%12"));
  EXPECT_FALSE(ValidateSyntax("C%12CC"));
}

TEST(ValidateChars, RejectsSpaceAndNonAscii) {
  EXPECT_TRUE(ValidateChars("CC(=O)O"));
  EXPECT_FALSE(ValidateChars("CC O"));
  EXPECT_FALSE(ValidateChars("C\xc3\xa9"));
}

}  // namespace
}  // namespace bcddi::smiles
