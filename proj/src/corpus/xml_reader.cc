// SPDX-License-Identifier: Apache-2.0

#include <expat.h>

#include <algorithm>
#include <cstring>
#include <exception>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>

#include "bcddi/corpus.h"
#include "bcddi/errors.h"
#include "bcddi/text.h"

namespace bcddi::corpus {
namespace {

std::string Attr(const XML_Char** attrs, const char* name) {
  for (int i = 0; attrs[i] != nullptr; i += 2) {
    if (std::strcmp(attrs[i], name) == 0) return attrs[i + 1];
  }
  return {};
}

bool HasAttr(const XML_Char** attrs, const char* name) {
  for (int i = 0; attrs[i] != nullptr; i += 2) {
    if (std::strcmp(attrs[i], name) == 0) return true;
  }
  return false;
}

std::size_t ParseOffset(const std::string& s, const std::string& entity_id) {
  if (s.empty() || !std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; })) {
    throw OffsetError("entity " + entity_id + ": malformed offset '" + s + "'");
  }
  return std::stoul(s);
}

struct Span {
  std::size_t start;
  std::size_t end;  // exclusive
};

// "a-b" or "a-b;c-d", inclusive ends.
std::vector<Span> ParseOffsets(const std::string& spec, const std::string& entity_id) {
  std::vector<Span> spans;
  for (const std::string& part : text::Split(spec, ';')) {
    std::string p = text::CollapseWhitespace(part);
    auto dash = p.find('-');
    if (dash == std::string::npos) {
      throw OffsetError("entity " + entity_id + ": malformed charOffset '" + spec + "'");
    }
    std::size_t start = ParseOffset(p.substr(0, dash), entity_id);
    std::size_t end_incl = ParseOffset(p.substr(dash + 1), entity_id);
    if (end_incl < start) {
      throw OffsetError("entity " + entity_id + ": reversed span in '" + spec + "'");
    }
    spans.push_back({start, end_incl + 1});
  }
  if (spans.empty()) throw OffsetError("entity " + entity_id + ": empty charOffset");
  return spans;
}

struct ParseState {
  std::string source;
  XML_Parser parser = nullptr;
  std::vector<Document> docs;
  Document* doc = nullptr;
  Sentence* sentence = nullptr;
  std::u32string sentence_chars;
  std::exception_ptr error;

  [[noreturn]] void Fail(const std::string& msg) {
    throw ParseError(source + ": byte " +
                     std::to_string(XML_GetCurrentByteIndex(parser)) + ": " + msg);
  }

  void StartDocument(const XML_Char** attrs) {
    docs.push_back(Document{Attr(attrs, "id"), source, {}});
    doc = &docs.back();
  }

  void StartSentence(const XML_Char** attrs) {
    if (doc == nullptr) Fail("<sentence> outside <document>");
    doc->sentences.push_back(Sentence{Attr(attrs, "id"), Attr(attrs, "text"), {}, {}});
    sentence = &doc->sentences.back();
    sentence_chars = text::DecodeUtf8(sentence->text);
  }

  void StartEntity(const XML_Char** attrs) {
    if (sentence == nullptr) Fail("<entity> outside <sentence>");
    EntityMention m;
    m.id = Attr(attrs, "id");
    m.text = Attr(attrs, "text");
    m.entity_type = Attr(attrs, "type");
    m.offsets = Attr(attrs, "charOffset");
    if (m.id.empty()) Fail("<entity> without id");
    std::vector<Span> spans = ParseOffsets(m.offsets, m.id);
    std::string joined;
    for (const Span& s : spans) {
      if (s.end > sentence_chars.size()) {
        throw OffsetError("entity " + m.id + ": offset " + m.offsets +
                          " outside sentence " + sentence->id + " of length " +
                          std::to_string(sentence_chars.size()));
      }
      if (!joined.empty()) joined += ' ';
      joined += text::EncodeUtf8(
          std::u32string_view(sentence_chars).substr(s.start, s.end - s.start));
    }
    if (text::CollapseWhitespace(joined) != text::CollapseWhitespace(m.text)) {
      throw OffsetError("entity " + m.id + ": text '" + m.text +
                        "' does not match sentence slice '" + joined + "'");
    }
    m.char_start = spans.front().start;
    m.char_end = spans.front().end;
    sentence->entities.push_back(std::move(m));
  }

  void StartPair(const XML_Char** attrs) {
    if (sentence == nullptr) Fail("<pair> outside <sentence>");
    PairAnnotation p;
    p.id = Attr(attrs, "id");
    p.e1 = Attr(attrs, "e1");
    p.e2 = Attr(attrs, "e2");
    std::string ddi = text::CaseFold(Attr(attrs, "ddi"));
    if (ddi == "false") {
      p.label = RelationLabel::kNegative;
    } else if (ddi == "true") {
      if (!HasAttr(attrs, "type")) {
        throw LabelError("pair " + p.id + ": ddi=\"true\" without a type");
      }
      p.label = LabelFromCorpusType(Attr(attrs, "type"));
    } else {
      throw LabelError("pair " + p.id + ": ddi attribute '" + Attr(attrs, "ddi") +
                       "' is neither true nor false");
    }
    sentence->pairs.push_back(std::move(p));
  }

  void Start(const XML_Char* name, const XML_Char** attrs) {
    if (std::strcmp(name, "document") == 0) {
      StartDocument(attrs);
    } else if (std::strcmp(name, "sentence") == 0) {
      StartSentence(attrs);
    } else if (std::strcmp(name, "entity") == 0) {
      StartEntity(attrs);
    } else if (std::strcmp(name, "pair") == 0) {
      StartPair(attrs);
    }
  }

  void End(const XML_Char* name) {
    if (std::strcmp(name, "sentence") == 0) {
      sentence = nullptr;
    } else if (std::strcmp(name, "document") == 0) {
      doc = nullptr;
    }
  }
};

void XMLCALL OnStart(void* data, const XML_Char* name, const XML_Char** attrs) {
  auto* st = static_cast<ParseState*>(data);
  if (st->error) return;
  try {
    st->Start(name, attrs);
  } catch (...) {
    st->error = std::current_exception();
    XML_StopParser(st->parser, XML_FALSE);
  }
}

void XMLCALL OnEnd(void* data, const XML_Char* name) {
  auto* st = static_cast<ParseState*>(data);
  if (!st->error) st->End(name);
}

}  // namespace

std::vector<Document> ParseCorpusXml(std::string_view xml, const std::string& source) {
  std::unique_ptr<std::remove_pointer_t<XML_Parser>, decltype(&XML_ParserFree)> parser(
      XML_ParserCreate("UTF-8"), &XML_ParserFree);
  if (!parser) throw ParseError(source + ": cannot create XML parser");
  ParseState st;
  st.source = source;
  st.parser = parser.get();
  XML_SetUserData(parser.get(), &st);
  XML_SetElementHandler(parser.get(), &OnStart, &OnEnd);
  XML_Status status = XML_Parse(parser.get(), xml.data(), static_cast<int>(xml.size()), XML_TRUE);
  if (st.error) std::rethrow_exception(st.error);
  if (status != XML_STATUS_OK) {
    throw ParseError(source + ": byte " +
                     std::to_string(XML_GetCurrentByteIndex(parser.get())) + ": " +
                     XML_ErrorString(XML_GetErrorCode(parser.get())));
  }
  return std::move(st.docs);
}

std::vector<Document> ParseCorpusFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open corpus file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return ParseCorpusXml(buf.str(), path);
}

CorpusParseResult ParseCorpusDirectory(const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw IoError("corpus directory '" + dir + "' not found");
  std::vector<std::string> files;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".xml") {
      files.push_back(entry.path().string());
    }
  }
  std::sort(files.begin(), files.end());
  CorpusParseResult result;
  for (const std::string& f : files) {
    try {
      auto docs = ParseCorpusFile(f);
      for (auto& d : docs) result.documents.push_back(std::move(d));
    } catch (const IoError&) {
      throw;
    } catch (const Error& e) {
      result.failures.emplace(f, e.what());
    }
  }
  return result;
}

}  // namespace bcddi::corpus
