// SPDX-License-Identifier: Apache-2.0

#ifndef BCDDI_TEXT_H_
#define BCDDI_TEXT_H_

#include <string>
#include <string_view>
#include <vector>

namespace bcddi::text {

// Invalid sequences decode to U+FFFD.
std::u32string DecodeUtf8(std::string_view bytes);
std::string EncodeUtf8(std::u32string_view chars);

bool IsSpace(char32_t c);
bool IsPunct(char32_t c);

// ASCII lower-casing; other code points pass through.
std::string CaseFold(std::string_view s);
// Trims and collapses runs of whitespace to one space.
std::string CollapseWhitespace(std::string_view s);

std::vector<std::string> Split(std::string_view s, char sep);

// "%.17g": enough digits to round-trip any binary64.
std::string FormatDouble(double v);

}  // namespace bcddi::text

#endif  // BCDDI_TEXT_H_
