// SPDX-License-Identifier: Apache-2.0

#include "bcddi/tokenizer.h"

#include <algorithm>
#include <istream>
#include <map>
#include <ostream>
#include <queue>
#include <set>

#include "bcddi/errors.h"
#include "bcddi/text.h"

namespace bcddi::ddi {

namespace {

char32_t FoldChar(char32_t c) { return c >= U'A' && c <= U'Z' ? c - U'A' + U'a' : c; }

std::string Piece(std::u32string_view chars, bool continuation) {
  std::string s = continuation ? std::string(kContinuation) : std::string();
  return s + text::EncodeUtf8(chars);
}

using SymbolPair = std::pair<std::string, std::string>;

std::string MergedSymbol(const SymbolPair& p) {
  std::string_view b = p.second;
  if (b.starts_with(kContinuation)) b.remove_prefix(kContinuation.size());
  return p.first + std::string(b);
}

struct HeapEntry {
  long count;
  SymbolPair pair;
  // priority_queue pops the largest: higher count first, then smaller pair.
  bool operator<(const HeapEntry& o) const {
    if (count != o.count) return count < o.count;
    return pair > o.pair;
  }
};

}  // namespace

std::vector<Word> PreTokenize(std::string_view text, std::span<const std::size_t> boundaries) {
  std::set<std::size_t> cuts(boundaries.begin(), boundaries.end());
  std::u32string chars = text::DecodeUtf8(text);
  std::vector<Word> words;
  Word cur;
  auto flush = [&] {
    if (!cur.text.empty()) words.push_back(std::move(cur));
    cur = Word{};
  };
  for (std::size_t i = 0; i < chars.size(); ++i) {
    char32_t c = chars[i];
    if (cuts.contains(i)) flush();
    if (text::IsSpace(c)) {
      flush();
      continue;
    }
    if (text::IsPunct(c)) {
      flush();
      words.push_back(Word{std::u32string(1, c), i});
      continue;
    }
    if (cur.text.empty()) cur.char_start = i;
    cur.text += FoldChar(c);
  }
  flush();
  return words;
}

Tokenizer::Tokenizer() {
  for (std::string_view s : {kPadToken, kUnkToken, kClsToken, kSepToken}) Add(std::string(s));
}

void Tokenizer::Add(std::string token) {
  if (ids_.contains(token)) return;
  std::size_t n = text::DecodeUtf8(token).size();
  if (token.starts_with(kContinuation)) n -= kContinuation.size();
  max_piece_chars_ = std::max(max_piece_chars_, n);
  ids_.emplace(token, tokens_.size());
  tokens_.push_back(std::move(token));
}

std::optional<std::size_t> Tokenizer::IdOf(std::string_view token) const {
  auto it = ids_.find(std::string(token));
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

Tokenizer Tokenizer::Train(std::span<const std::string> texts, std::size_t target_size,
                           std::size_t min_pair_count) {
  std::map<std::u32string, long> freq;
  for (const std::string& t : texts) {
    for (Word& w : PreTokenize(t)) ++freq[w.text];
  }
  std::vector<std::vector<std::string>> words;
  std::vector<long> counts;
  std::set<std::string> alphabet;
  for (const auto& [w, c] : freq) {
    std::vector<std::string> sym;
    for (std::size_t i = 0; i < w.size(); ++i) {
      sym.push_back(Piece(std::u32string_view(&w[i], 1), i > 0));
      alphabet.insert(sym.back());
    }
    words.push_back(std::move(sym));
    counts.push_back(c);
  }

  Tokenizer tok;
  for (const std::string& s : alphabet) tok.Add(s);

  std::map<SymbolPair, long> pair_count;
  std::map<SymbolPair, std::set<std::size_t>> where;
  for (std::size_t wi = 0; wi < words.size(); ++wi) {
    for (std::size_t i = 0; i + 1 < words[wi].size(); ++i) {
      SymbolPair p{words[wi][i], words[wi][i + 1]};
      pair_count[p] += counts[wi];
      where[p].insert(wi);
    }
  }
  std::priority_queue<HeapEntry> heap;
  for (const auto& [p, c] : pair_count) heap.push(HeapEntry{c, p});

  auto adjust = [&](std::size_t wi, long sign) {
    const auto& w = words[wi];
    for (std::size_t i = 0; i + 1 < w.size(); ++i) {
      SymbolPair p{w[i], w[i + 1]};
      long& c = pair_count[p];
      c += sign * counts[wi];
      if (sign > 0) {
        where[p].insert(wi);
        heap.push(HeapEntry{c, p});
      }
    }
  };

  while (tok.size() < target_size && !heap.empty()) {
    HeapEntry top = heap.top();
    heap.pop();
    auto it = pair_count.find(top.pair);
    if (it == pair_count.end() || it->second != top.count) continue;  // stale
    if (top.count < static_cast<long>(min_pair_count)) break;
    const SymbolPair best = top.pair;
    const std::string merged = MergedSymbol(best);
    std::set<std::size_t> affected = where[best];
    for (std::size_t wi : affected) {
      adjust(wi, -1);
      std::vector<std::string>& w = words[wi];
      std::vector<std::string> out;
      for (std::size_t i = 0; i < w.size(); ++i) {
        if (i + 1 < w.size() && w[i] == best.first && w[i + 1] == best.second) {
          out.push_back(merged);
          ++i;
        } else {
          out.push_back(w[i]);
        }
      }
      w = std::move(out);
      adjust(wi, +1);
    }
    pair_count.erase(best);
    where.erase(best);
    tok.Add(merged);
  }
  return tok;
}

void Tokenizer::Save(std::ostream& out) const {
  for (const std::string& t : tokens_) out << t << '\n';
}

Tokenizer Tokenizer::Load(std::istream& in) {
  Tokenizer tok;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no <= 4) {
      if (line != tok.tokens_[line_no - 1]) {
        throw FormatError("tokenizer vocabulary line " + std::to_string(line_no) +
                          ": expected " + tok.tokens_[line_no - 1]);
      }
      continue;
    }
    if (line.empty() || tok.ids_.contains(line)) {
      throw FormatError("tokenizer vocabulary line " + std::to_string(line_no) +
                        ": empty or duplicate token");
    }
    tok.Add(line);
  }
  if (line_no < 4) throw FormatError("tokenizer vocabulary is missing special tokens");
  return tok;
}

std::vector<Token> Tokenizer::Encode(std::string_view text,
                                     std::span<const std::size_t> boundaries) const {
  std::vector<Token> out;
  for (const Word& w : PreTokenize(text, boundaries)) {
    std::size_t mark = out.size();
    std::size_t pos = 0;
    bool unknown = false;
    while (pos < w.text.size()) {
      std::size_t end = std::min(w.text.size(), pos + max_piece_chars_);
      bool found = false;
      for (; end > pos; --end) {
        auto id = IdOf(Piece(std::u32string_view(w.text).substr(pos, end - pos), pos > 0));
        if (id.has_value()) {
          out.push_back(Token{*id, w.char_start + pos, w.char_start + end});
          found = true;
          break;
        }
      }
      if (!found) {
        unknown = true;
        break;
      }
      pos = end;
    }
    if (unknown) {
      out.resize(mark);
      out.push_back(Token{kUnkId, w.char_start, w.char_start + w.text.size()});
    }
  }
  return out;
}

}  // namespace bcddi::ddi
