// SPDX-License-Identifier: Apache-2.0

#include "bcddi/kv.h"

#include <charconv>
#include <fstream>
#include <sstream>

#include "bcddi/errors.h"
#include "bcddi/text.h"

namespace bcddi::kv {

KeyValues Parse(const std::string& body) {
  KeyValues out;
  std::istringstream in(body);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string t = text::CollapseWhitespace(line);
    if (t.empty() || t[0] == '#') continue;
    std::size_t eq = t.find('=');
    if (eq == std::string::npos) {
      throw FormatError("config line " + std::to_string(line_no) + ": expected key = value");
    }
    out[text::CollapseWhitespace(t.substr(0, eq))] = text::CollapseWhitespace(t.substr(eq + 1));
  }
  return out;
}

KeyValues ReadFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return Parse(ss.str());
}

void WriteFile(const std::string& path, const KeyValues& values) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  for (const auto& [k, v] : values) out << k << " = " << v << '\n';
  if (!out) throw IoError("failed writing '" + path + "'");
}

std::string GetString(const KeyValues& kv, const std::string& key) {
  auto it = kv.find(key);
  if (it == kv.end()) throw ConfigError("missing config key '" + key + "'");
  return it->second;
}

double GetDouble(const KeyValues& kv, const std::string& key) {
  std::string s = GetString(kv, key);
  try {
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw ConfigError("config key '" + key + "': not a number: '" + s + "'");
}

std::uint64_t GetU64(const KeyValues& kv, const std::string& key) {
  std::string s = GetString(kv, key);
  std::uint64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) {
    throw ConfigError("config key '" + key + "': not an unsigned integer: '" + s + "'");
  }
  return v;
}

std::size_t GetSize(const KeyValues& kv, const std::string& key) {
  return static_cast<std::size_t>(GetU64(kv, key));
}

std::vector<std::size_t> GetSizeList(const KeyValues& kv, const std::string& key) {
  std::vector<std::size_t> out;
  for (const std::string& part : text::Split(GetString(kv, key), ',')) {
    KeyValues one{{key, text::CollapseWhitespace(part)}};
    out.push_back(GetSize(one, key));
  }
  return out;
}

std::string JoinSizes(const std::vector<std::size_t>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(v[i]);
  }
  return s;
}

}  // namespace bcddi::kv
