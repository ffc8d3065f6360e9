// SPDX-License-Identifier: Apache-2.0
//
// Subword tokenizer: BPE-style merges learned from the corpus, applied at
// encode time by greedy longest match with "##" continuation pieces.

#ifndef BCDDI_TOKENIZER_H_
#define BCDDI_TOKENIZER_H_

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace bcddi::ddi {

inline constexpr std::string_view kPadToken = "[PAD]";
inline constexpr std::string_view kUnkToken = "[UNK]";
inline constexpr std::string_view kClsToken = "[CLS]";
inline constexpr std::string_view kSepToken = "[SEP]";
inline constexpr std::size_t kPadId = 0;
inline constexpr std::size_t kUnkId = 1;
inline constexpr std::size_t kClsId = 2;
inline constexpr std::size_t kSepId = 3;
inline constexpr std::string_view kContinuation = "##";

struct Token {
  std::size_t id = 0;
  std::size_t char_start = 0;  // code points, half-open
  std::size_t char_end = 0;
};

// Words split on whitespace; every punctuation character is its own word;
// a split is also forced at each offset in `boundaries`.
struct Word {
  std::u32string text;  // case-folded
  std::size_t char_start = 0;
};
std::vector<Word> PreTokenize(std::string_view text, std::span<const std::size_t> boundaries = {});

class Tokenizer {
 public:
  Tokenizer();

  // Learns merges until the vocabulary reaches `target_size` or no pair
  // occurs at least `min_pair_count` times. Ties go to the
  // lexicographically smallest pair.
  static Tokenizer Train(std::span<const std::string> texts, std::size_t target_size = 8000,
                         std::size_t min_pair_count = 2);

  // One token per line, specials first. Throws FormatError.
  void Save(std::ostream& out) const;
  static Tokenizer Load(std::istream& in);

  std::size_t size() const { return tokens_.size(); }
  const std::string& TokenAt(std::size_t id) const { return tokens_.at(id); }
  std::optional<std::size_t> IdOf(std::string_view token) const;

  // Greedy longest match per word; a word with an unmatched remainder
  // becomes one [UNK] spanning the word.
  std::vector<Token> Encode(std::string_view text,
                            std::span<const std::size_t> boundaries = {}) const;

  bool operator==(const Tokenizer& other) const { return tokens_ == other.tokens_; }

 private:
  void Add(std::string token);

  std::vector<std::string> tokens_;
  std::unordered_map<std::string, std::size_t> ids_;
  std::size_t max_piece_chars_ = 1;
};

}  // namespace bcddi::ddi

#endif  // BCDDI_TOKENIZER_H_
