// SPDX-License-Identifier: Apache-2.0
//
// Flat "key = value" files. '#' starts a comment line.

#ifndef BCDDI_KV_H_
#define BCDDI_KV_H_

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace bcddi::kv {

using KeyValues = std::map<std::string, std::string>;

// Throws IoError if unreadable, FormatError on a line without '='.
KeyValues ReadFile(const std::string& path);
KeyValues Parse(const std::string& text);
void WriteFile(const std::string& path, const KeyValues& values);

// Typed lookups; throw ConfigError when missing or malformed.
std::string GetString(const KeyValues& kv, const std::string& key);
double GetDouble(const KeyValues& kv, const std::string& key);
std::size_t GetSize(const KeyValues& kv, const std::string& key);
std::uint64_t GetU64(const KeyValues& kv, const std::string& key);
// Comma-separated list of sizes, e.g. "9,9,10".
std::vector<std::size_t> GetSizeList(const KeyValues& kv, const std::string& key);
std::string JoinSizes(const std::vector<std::size_t>& v);

}  // namespace bcddi::kv

#endif  // BCDDI_KV_H_
