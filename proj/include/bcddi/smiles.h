// SPDX-License-Identifier: Apache-2.0
//
// SMILES character vocabulary and the one-hot representation fed to the
// chemical VAE.

#ifndef BCDDI_SMILES_H_
#define BCDDI_SMILES_H_

#include <array>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bcddi/nn/tensor.h"

namespace bcddi::smiles {

inline constexpr std::size_t kDefaultMaxLen = 120;
inline constexpr std::size_t kPadIndex = 0;
inline constexpr std::string_view kPadToken = "<pad>";

// Characters always present: C = ( ) O F 1..9.
inline constexpr std::string_view kMandatoryChars = "C=()OF123456789";

// PAD at index 0, then characters in ascending code point order.
class SmilesVocab {
 public:
  // Mandatory set plus every character observed. Throws VocabError for an
  // empty list or a non-ASCII / non-printable character.
  static SmilesVocab Build(std::span<const std::string> smiles);

  // One entry per line, "<pad>" first.
  void Save(std::ostream& out) const;
  static SmilesVocab Load(std::istream& in);

  std::size_t size() const { return chars_.size() + 1; }
  // Character at `index` (index 0 is PAD and has no character).
  char CharAt(std::size_t index) const;
  std::optional<std::size_t> IndexOf(char c) const;
  bool Contains(char c) const { return IndexOf(c).has_value(); }
  const std::vector<char>& chars() const { return chars_; }

  bool operator==(const SmilesVocab& other) const { return chars_ == other.chars_; }

 private:
  explicit SmilesVocab(std::vector<char> chars);

  std::vector<char> chars_;            // without PAD
  std::array<int, 128> index_{};       // char -> index, 0 if absent
};

struct SmilesOneHot {
  nn::Tensor matrix;                   // max_len x |X|
  std::vector<std::size_t> indices;    // argmax of each row
  std::size_t true_len = 0;
};

// Truncates to max_len; remaining rows are PAD. Throws EncodeError naming
// the position of the first out-of-vocabulary character.
SmilesOneHot EncodeOneHot(std::string_view smiles, const SmilesVocab& vocab,
                          std::size_t max_len = kDefaultMaxLen);

// Row-wise argmax (ties to the lowest index), stopping at the first PAD.
// Throws DistributionError if a row does not sum to 1 within 1e-5 or has a
// negative entry.
std::string DecodeGreedy(const nn::Tensor& probs, const SmilesVocab& vocab);

// Printable ASCII without whitespace; the lexicon applies this to every
// SMILES it loads.
bool ValidateChars(std::string_view smiles);

// Shallow syntax gate: non-empty, balanced parentheses, and every ring
// closure label used an even number of times. Bracket atoms ("[NH3+]") are
// skipped and "%nn" counts as one two-digit label.
bool ValidateSyntax(std::string_view smiles);

}  // namespace bcddi::smiles

#endif  // BCDDI_SMILES_H_
