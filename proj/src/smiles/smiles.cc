// SPDX-License-Identifier: Apache-2.0

#include "bcddi/smiles.h"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <set>

#include "bcddi/errors.h"

namespace bcddi::smiles {

SmilesVocab::SmilesVocab(std::vector<char> chars) : chars_(std::move(chars)) {
  for (std::size_t i = 0; i < chars_.size(); ++i) {
    index_[static_cast<unsigned char>(chars_[i])] = static_cast<int>(i + 1);
  }
}

SmilesVocab SmilesVocab::Build(std::span<const std::string> smiles) {
  if (smiles.empty()) throw VocabError("cannot build a vocabulary from no SMILES");
  std::set<char> chars(kMandatoryChars.begin(), kMandatoryChars.end());
  for (const std::string& s : smiles) {
    for (char c : s) {
      auto u = static_cast<unsigned char>(c);
      if (u >= 0x80 || u <= 0x20 || u == 0x7f) {
        throw VocabError("unsupported character in SMILES '" + s + "'");
      }
      chars.insert(c);
    }
  }
  return SmilesVocab(std::vector<char>(chars.begin(), chars.end()));
}

void SmilesVocab::Save(std::ostream& out) const {
  out << kPadToken << '\n';
  for (char c : chars_) out << c << '\n';
}

SmilesVocab SmilesVocab::Load(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kPadToken) {
    throw FormatError("SMILES vocabulary must start with " + std::string(kPadToken));
  }
  std::vector<char> chars;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.size() != 1) {
      throw FormatError("SMILES vocabulary line " + std::to_string(line_no) +
                        " is not a single character");
    }
    chars.push_back(line[0]);
  }
  std::vector<char> sorted = chars;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw FormatError("SMILES vocabulary has duplicate characters");
  }
  return SmilesVocab(std::move(chars));
}

char SmilesVocab::CharAt(std::size_t index) const {
  if (index == kPadIndex || index > chars_.size()) {
    throw IndexError("no character at vocabulary index " + std::to_string(index));
  }
  return chars_[index - 1];
}

std::optional<std::size_t> SmilesVocab::IndexOf(char c) const {
  auto u = static_cast<unsigned char>(c);
  if (u >= 128 || index_[u] == 0) return std::nullopt;
  return static_cast<std::size_t>(index_[u]);
}

SmilesOneHot EncodeOneHot(std::string_view smiles, const SmilesVocab& vocab,
                          std::size_t max_len) {
  SmilesOneHot out;
  out.true_len = std::min(smiles.size(), max_len);
  out.indices.assign(max_len, kPadIndex);
  out.matrix = nn::Tensor(nn::Shape{max_len, vocab.size()});
  for (std::size_t i = 0; i < out.true_len; ++i) {
    auto idx = vocab.IndexOf(smiles[i]);
    if (!idx) {
      throw EncodeError("character '" + std::string(1, smiles[i]) +
                        "' at position " + std::to_string(i) + " of '" +
                        std::string(smiles) + "' is not in the vocabulary");
    }
    out.indices[i] = *idx;
  }
  for (std::size_t i = 0; i < max_len; ++i) out.matrix.at(i, out.indices[i]) = 1.0;
  return out;
}

std::string DecodeGreedy(const nn::Tensor& probs, const SmilesVocab& vocab) {
  if (probs.cols() != vocab.size()) {
    throw ShapeError("decode: matrix width " + std::to_string(probs.cols()) +
                     " vs vocabulary size " + std::to_string(vocab.size()));
  }
  std::string out;
  for (std::size_t r = 0; r < probs.rows(); ++r) {
    auto row = probs.row(r);
    double sum = 0.0;
    std::size_t best = 0;
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (row[j] < 0.0 || !std::isfinite(row[j])) {
        throw DistributionError("row " + std::to_string(r) + " has an invalid entry");
      }
      sum += row[j];
      if (row[j] > row[best]) best = j;
    }
    if (std::abs(sum - 1.0) > 1e-5) {
      throw DistributionError("row " + std::to_string(r) + " sums to " +
                              std::to_string(sum));
    }
    if (best == kPadIndex) break;
    out.push_back(vocab.CharAt(best));
  }
  return out;
}

bool ValidateChars(std::string_view smiles) {
  return std::all_of(smiles.begin(), smiles.end(), [](char c) {
    auto u = static_cast<unsigned char>(c);
    return u > 0x20 && u < 0x7f;
  });
}

bool ValidateSyntax(std::string_view smiles) {
  if (smiles.empty()) return false;
  int depth = 0;
  std::map<int, int> ring_uses;
  for (std::size_t i = 0; i < smiles.size(); ++i) {
    char c = smiles[i];
    if (c == '[') {
      std::size_t close = smiles.find(']', i);
      if (close == std::string_view::npos) return false;
      i = close;
    } else if (c == '(') {
      ++depth;
    } else if (c == ')') {
      if (--depth < 0) return false;
    } else if (c == '%') {
      if (i + 2 >= smiles.size() || !std::isdigit(static_cast<unsigned char>(smiles[i + 1])) ||
          !std::isdigit(static_cast<unsigned char>(smiles[i + 2]))) {
        return false;
      }
      ++ring_uses[(smiles[i + 1] - '0') * 10 + (smiles[i + 2] - '0')];
      i += 2;
    } else if (c >= '0' && c <= '9') {
      ++ring_uses[c - '0'];
    }
  }
  if (depth != 0) return false;
  return std::all_of(ring_uses.begin(), ring_uses.end(),
                     [](const auto& kv) { return kv.second % 2 == 0; });
}

}  // namespace bcddi::smiles
